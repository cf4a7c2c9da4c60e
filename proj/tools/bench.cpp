// bench: experiment grids, geometry verification and plotting.
//
//   bench run <config> [--full] [--jobs K] [--out DIR] [--seed S]
//   bench verify [--suite NAME] [--json FILE] [--seed S]
//   bench plot <records-dir>

#include "zorasa/bench/harness.hpp"
#include "zorasa/bench/problems.hpp"
#include "zorasa/bench/svg.hpp"
#include "zorasa/verify/checks.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace zorasa;
using verify::BoundCheckReport;

std::vector<BoundCheckReport> run_suite(const std::string& suite, std::uint64_t seed, std::int64_t n_mc) {
  std::vector<BoundCheckReport> out;
  auto want = [&](const char* name) { return suite == "all" || suite == name; };
  auto stream = [seed](const char* name) { return RandomStream::derive(seed, bench::fnv1a(name)); };

  if (want("assumption1")) {
    auto rng = stream("assumption1");
    out.push_back(verify::check_assumption1(Sphere(10), RetractionKind::Projection, 1000, 1.0, rng));
    out.push_back(verify::check_assumption1(Grassmann(10, 5), RetractionKind::Projection, 1000, 1.0, rng));
    out.push_back(verify::check_assumption1(Stiefel(8, 3), RetractionKind::Projection, 1000, 1.0, rng, {128, 1e-6}));
  }
  if (want("retraction-order")) {
    auto rng = stream("retraction-order");
    out.push_back(verify::check_second_order_retraction(Sphere(10), RetractionKind::Polar, 100, rng));
    out.push_back(verify::check_second_order_retraction(Grassmann(10, 5), RetractionKind::Polar, 100, rng));
  }
  if (want("principal-angle")) {
    auto rng = stream("principal-angle");
    out.push_back(verify::check_principal_angle_lemma(10, 5, 1000, rng));
    out.push_back(verify::check_principal_angle_lemma(30, 5, 1000, rng));
  }
  if (want("transport-bound")) {
    auto rng = stream("transport-bound");
    out.push_back(verify::check_transport_error_bound(Grassmann(10, 5), 1000, rng, 4.0));
    out.push_back(verify::check_transport_error_bound(Sphere(10), 1000, rng));
    out.push_back(verify::check_transport_error_bound(Stiefel(8, 3), 200, rng, std::nullopt, 1.0, {128, 1e-6}));
  }
  if (want("estimator-moments")) {
    auto rng = stream("estimator-moments");
    const bench::SphereQuadratic prob = bench::make_sphere_quadratic(10, rng);
    const Sphere sphere(10);
    const StochasticOracle oracle = bench::make_sphere_quadratic_oracle(prob);
    std::vector<ManifoldPoint> points;
    for (int i = 0; i < 5; ++i) points.push_back(sphere.random_point(rng));
    auto reps = verify::check_estimator_bounds(oracle, sphere, points, 1e-3, 1, n_mc, rng);
    out.insert(out.end(), reps.begin(), reps.end());
  }
  return out;
}

int cmd_verify(const std::string& suite, const std::string& json_path, std::uint64_t seed, std::int64_t n_mc) {
  const auto reports = run_suite(suite, seed, n_mc);
  std::string json = "[\n";
  bool ok = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    std::printf("%s %s\n", r.passed() ? "PASS" : "FAIL", r.to_text().c_str());
    json += "  " + r.to_json() + (i + 1 < reports.size() ? ",\n" : "\n");
    ok = ok && r.passed();
  }
  json += "]\n";
  if (!json_path.empty()) bench::write_file_atomic(json_path, json);
  return ok ? 0 : 1;
}

int cmd_run(const std::string& config_path, bool full, int jobs, const std::string& out, std::int64_t seed) {
  bench::GridConfig cfg = bench::load_config(config_path);
  if (full) cfg.full = true;
  if (jobs > 0) cfg.jobs = jobs;
  if (!out.empty()) cfg.output_dir = out;
  if (seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed);

  const std::filesystem::path dir(cfg.output_dir);
  int failures = 0;
  const auto cells = bench::run_grid(cfg, dir, cfg.jobs, [&](const bench::CellResult& c) {
    const double g = c.records.empty() ? 0.0 : c.records.back().grad_norm;
    std::fprintf(stderr, "%-14s %-10s seed %d  N=%lld  final ||grad f|| = %.4g%s\n",
                 bench::problem_key(c.problem).c_str(), c.plan.algorithm.c_str(), c.seed,
                 static_cast<long long>(c.plan.N), g, c.failure ? "  FAILED" : "");
    if (c.failure) {
      ++failures;
      std::fprintf(stderr, "  %s\n", c.failure->c_str());
    }
  });
  const auto plots = bench::plot_directory(dir);
  std::fprintf(stderr, "%zu cells, %d failed; wrote %s/aggregate.csv, summary.json and %zu plots\n", cells.size(),
               failures, dir.string().c_str(), plots.size());
  return 0;
}

int cmd_plot(const std::string& dir) {
  for (const auto& p : bench::plot_directory(dir)) std::printf("%s\n", p.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeroth-order Riemannian optimization benchmarks"};
  app.require_subcommand(1);

  std::string config, out, json_path, suite = "all", plot_dir;
  bool full = false;
  int jobs = 0;
  std::int64_t run_seed = -1;
  std::uint64_t verify_seed = 7;
  std::int64_t n_mc = 200000;

  auto* run = app.add_subcommand("run", "run an experiment grid");
  run->add_option("config", config, "grid config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_flag("--full", full, "full-scale N instead of N/100");
  run->add_option("--jobs", jobs, "parallel cells")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "output directory");
  run->add_option("--seed", run_seed, "master seed")->check(CLI::NonNegativeNumber);

  auto* ver = app.add_subcommand("verify", "check geometric bounds and estimator moments");
  ver->add_option("--suite", suite, "suite to run")
      ->check(CLI::IsMember(
          {"assumption1", "retraction-order", "principal-angle", "transport-bound", "estimator-moments", "all"}));
  ver->add_option("--json", json_path, "write reports as a JSON array");
  ver->add_option("--seed", verify_seed, "random seed");
  ver->add_option("--samples", n_mc, "Monte Carlo samples per point for estimator-moments")
      ->check(CLI::Range(std::int64_t{2}, std::int64_t{100000000}));

  auto* plot = app.add_subcommand("plot", "render SVG figures from a records directory");
  plot->add_option("records-dir", plot_dir, "directory containing aggregate.csv")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, full, jobs, out, run_seed);
    if (*ver) return cmd_verify(suite, json_path, verify_seed, n_mc);
    if (*plot) return cmd_plot(plot_dir);
  } catch (const zorasa::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
