// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--only K]...

#include "zorasa/bench/harness.hpp"
#include "zorasa/bench/problems.hpp"
#include "zorasa/verify/checks.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace {

using namespace zorasa;
using verify::BoundCheckReport;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

RandomStream stream(const char* name) { return RandomStream::derive(20240601, bench::fnv1a(name)); }

std::string summarize(const BoundCheckReport& r) {
  return r.name + " violations=" + std::to_string(r.n_violations) + "/" + std::to_string(r.n_trials) +
         " max_ratio=" + fmt("%.4g", r.max_ratio) + " fitted=" + fmt("%.4g", r.fitted_constant);
}

Outcome all_pass(const std::vector<BoundCheckReport>& reps) {
  Outcome o{true, ""};
  for (const auto& r : reps) {
    o.pass = o.pass && r.passed();
    o.detail += (o.detail.empty() ? "" : "; ") + summarize(r);
  }
  return o;
}

// Shared setup of criteria 1 and 2: S^9, f(x) = -1/2 x^T Sigma x, mu = 1e-3,
// m = 1, 2e5 samples at each of three points.
const std::vector<BoundCheckReport>& estimator_reports() {
  static const std::vector<BoundCheckReport> reps = [] {
    auto rng = stream("estimator");
    const Sphere sphere(10);
    static const bench::SphereQuadratic prob = bench::make_sphere_quadratic(10, rng);
    const StochasticOracle oracle = bench::make_sphere_quadratic_oracle(prob);
    std::vector<ManifoldPoint> points;
    for (int i = 0; i < 3; ++i) points.push_back(sphere.random_point(rng));
    return verify::check_estimator_bounds(oracle, sphere, points, 1e-3, 1, 200000, rng);
  }();
  return reps;
}

Outcome criterion1() {
  const auto& r = estimator_reports()[0];
  return {r.passed(), summarize(r)};
}

Outcome criterion2() {
  const auto& reps = estimator_reports();
  return all_pass({reps[1], reps[2], reps[3]});
}

Outcome criterion3() {
  auto rng = stream("transport-bound");
  return all_pass({verify::check_transport_error_bound(Grassmann(10, 5), 1000, rng, 4.0)});
}

Outcome criterion4() {
  auto rng = stream("principal-angle");
  return all_pass({verify::check_principal_angle_lemma(10, 5, 1000, rng),
                   verify::check_principal_angle_lemma(30, 5, 1000, rng)});
}

Outcome criterion5() {
  auto rng = stream("assumption1");
  return all_pass({verify::check_assumption1(Sphere(10), RetractionKind::Projection, 1000, 1.0, rng),
                   verify::check_assumption1(Grassmann(10, 5), RetractionKind::Projection, 1000, 1.0, rng),
                   verify::check_assumption1(Stiefel(8, 3), RetractionKind::Projection, 1000, 1.0, rng, {128, 1e-6})});
}

Outcome criterion6() {
  auto rng = stream("retraction-order");
  return all_pass({verify::check_second_order_retraction(Sphere(10), RetractionKind::Polar, 100, rng, 1.9),
                   verify::check_second_order_retraction(Grassmann(10, 5), RetractionKind::Polar, 100, rng, 1.9)});
}

Outcome criterion7() {
  auto rng = stream("isometry");
  auto reps = std::vector<BoundCheckReport>{
      verify::check_transport_isometry(Grassmann(10, 5), 200, rng, 1e-10),
      verify::check_transport_isometry(Sphere(10), 200, rng, 1e-10),
      verify::check_ode_transport(Grassmann(10, 5), 50, rng, 256, 1e-8),
      verify::check_ode_transport(Sphere(10), 50, rng, 256, 1e-8),
  };
  Outcome o = all_pass(reps);
  for (std::size_t i = 2; i < reps.size(); ++i) {
    double lo = 0, hi = 0;
    for (const auto& [k, v] : reps[i].extra) {
      if (k == "min_halving_ratio") lo = v;
      if (k == "max_halving_ratio") hi = v;
    }
    o.pass = o.pass && lo >= 8.0 && hi <= 32.0;
    o.detail += "; " + reps[i].name + " halving ratio in [" + fmt("%.3g", lo) + ", " + fmt("%.3g", hi) + "]";
  }
  return o;
}

Outcome criterion8() {
  auto rng = stream("stiefel-geodesic");
  return all_pass({verify::check_stiefel_geodesic(8, 3, 100, rng, 2000, 1e-6)});
}

double mean_sq_grad(const std::vector<ExperimentRecord>& recs) {
  double s = 0;
  for (const auto& r : recs) s += r.grad_norm * r.grad_norm;
  return s / static_cast<double>(recs.size());
}

Outcome criterion9() {
  const bench::ProblemSpec p{"kpca", 10, 5};
  double at[2] = {0, 0};
  const std::int64_t Ns[2] = {5000, 20000};
  bool failed = false;
  for (int j = 0; j < 2; ++j) {
    bench::GridConfig cfg;
    cfg.record_points = Ns[j];
    bench::AlgorithmSpec a{"zo-rasa", "zo-rasa"};
    a.N = Ns[j];
    a.beta = 100.0;
    a.tau_scale = 1.0;
    a.tau_mode = TauMode::SingleSample;
    for (int seed = 0; seed < 5; ++seed) {
      const auto cell = bench::run_cell(cfg, p, a, seed);
      failed = failed || cell.failure.has_value();
      at[j] += mean_sq_grad(cell.records) / 5.0;
    }
  }
  const double ratio = at[0] / at[1];
  return {!failed && ratio >= 1.2 && ratio <= 3.5,
          "mean ||grad f||^2 over the run: N=5000 " + fmt("%.4g", at[0]) + ", N=20000 " + fmt("%.4g", at[1]) +
              ", ratio " + fmt("%.3f", ratio) + " (band [1.2, 3.5])"};
}

Outcome criterion10() {
  const bench::ProblemSpec p{"kpca", 10, 5};
  const bench::GridConfig cfg;
  std::map<std::string, double> final_grad;
  std::map<std::string, double> calls;
  bool failed = false;
  for (const char* name : {"zo-rasa", "zo-rsgd-1", "zo-rsgd-m"}) {
    for (int seed = 0; seed < 5; ++seed) {
      const auto cell = bench::run_cell(cfg, p, {name, name}, seed);
      failed = failed || cell.failure.has_value();
      final_grad[name] += cell.records.back().grad_norm / 5.0;
      calls[name] = static_cast<double>(cell.records.back().oracle_calls);
    }
  }
  const double rasa = final_grad["zo-rasa"], one = final_grad["zo-rsgd-1"], m = final_grad["zo-rsgd-m"];
  const bool pass = !failed && rasa <= 1.5 * std::min(one, m) && rasa < m;
  return {pass, "mean final ||grad f||: zo-rasa " + fmt("%.4g", rasa) + " (" + fmt("%.0f", calls["zo-rasa"]) +
                    " calls), zo-rsgd-1 " + fmt("%.4g", one) + " (" + fmt("%.0f", calls["zo-rsgd-1"]) +
                    " calls), zo-rsgd-m " + fmt("%.4g", m) + " (" + fmt("%.0f", calls["zo-rsgd-m"]) + " calls)"};
}

Outcome criterion11() {
  const bench::ProblemSpec p{"psd", 10, 5};
  const bench::GridConfig cfg;
  int reduced = 0, failures = 0;
  std::string ratios;
  for (int seed = 0; seed < 5; ++seed) {
    const auto cell = bench::run_cell(cfg, p, {"zo-rasa", "zo-rasa"}, seed);
    if (cell.failure) ++failures;
    const double first = cell.records.front().problem_metric, last = cell.records.back().problem_metric;
    const double ratio = last / first;
    if (std::isfinite(ratio) && ratio <= 0.5) ++reduced;
    ratios += (ratios.empty() ? "" : ", ") + fmt("%.3g", first) + " -> " + fmt("%.3g", last);
  }
  return {reduced == 5 && failures == 0, "||GG^T - W*||_F per seed: " + ratios + "; " + std::to_string(reduced) +
                                             "/5 seeds reduced by 50%, " + std::to_string(failures) +
                                             " failed runs"};
}

Outcome criterion12() {
  const bench::GridConfig cfg;
  bool same = true;
  std::string detail;
  for (const char* type : {"kpca", "psd"}) {
    const bench::ProblemSpec p{type, 10, 5};
    for (const char* name : {"zo-rasa", "zo-rsgd-m"}) {
      const std::string a = bench::to_csv(bench::run_cell(cfg, p, {name, name}, 3).records);
      const std::string b = bench::to_csv(bench::run_cell(cfg, p, {name, name}, 3).records);
      same = same && a == b;
      detail += (detail.empty() ? "" : ", ") + bench::problem_key(p) + "/" + name + " " +
                std::to_string(a.size()) + " bytes " + (a == b ? "identical" : "DIFFER");
    }
  }
  return {same, detail};
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "estimator bias bound on S^9", 60, criterion1},
      {2, "estimator second and fourth moment bounds on S^9", 120, criterion2},
      {3, "Grassmann projection vs parallel transport within C = 4", 30, criterion3},
      {4, "principal angles bounded by ||G||_F", 10, criterion4},
      {5, "non-expansive transport and retraction distance on sphere, Grassmann, Stiefel", 60, criterion5},
      {6, "polar retraction is second order on sphere and Grassmann", 30, criterion6},
      {7, "parallel transport isometry and fourth-order ODE reference", 60, criterion7},
      {8, "Stiefel matrix-exponential geodesic vs RK4", 60, criterion8},
      {9, "Zo-RASA k-PCA rate scaling, budget 4N vs N", 600, criterion9},
      {10, "desk k-PCA n=10 comparison against Zo-RSGD", 900, criterion10},
      {11, "desk fixed-rank PSD n=10 halves ||GG^T - W*||_F", 600, criterion11},
      {12, "byte-identical CSV on rerun", 60, criterion12},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "run only these criteria")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  bool ok = true;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += "; over time budget";
    }
    std::printf("%s criterion %d: %s [%s] (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
