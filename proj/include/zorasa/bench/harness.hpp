#pragma once

#include "zorasa/bench/config.hpp"
#include "zorasa/bench/csv.hpp"
#include "zorasa/bench/problems.hpp"
#include "zorasa/rasa.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace zorasa::bench {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string problem_key(const ProblemSpec& p) {
  return p.type + "_n" + std::to_string(p.n) + "_r" + std::to_string(p.r);
}

inline Index problem_dimension(const ProblemSpec& p) {
  return dimension(p.type == "kpca" ? ManifoldKind::Stiefel : ManifoldKind::FixedRankPSD, p.n, p.r);
}

struct CellResult {
  ProblemSpec problem;
  CellPlan plan;
  int seed = 0;
  Index d = 0;
  double mu = 0.0;
  std::vector<ExperimentRecord> records;
  std::optional<std::string> failure;
  std::filesystem::path csv_path;  // relative to the output directory
};

// Streams: the problem instance depends on (master seed, problem); x0 on
// (master seed, problem, seed); the run itself on the full cell identity.
inline RandomStream problem_stream(std::uint64_t master, const ProblemSpec& p) {
  return RandomStream::derive(master, fnv1a("problem/" + problem_key(p)));
}
inline RandomStream start_stream(std::uint64_t master, const ProblemSpec& p, int seed) {
  return RandomStream::derive(master, fnv1a("x0/" + problem_key(p) + "/" + std::to_string(seed)));
}
inline RandomStream cell_stream(std::uint64_t master, const ProblemSpec& p, const std::string& label, int seed) {
  return RandomStream::derive(master, fnv1a("cell/" + problem_key(p) + "/" + label + "/" + std::to_string(seed)));
}

inline std::filesystem::path cell_csv_path(const ProblemSpec& p, const std::string& label, int seed) {
  return std::filesystem::path(problem_key(p)) / (label + "_seed" + std::to_string(seed) + ".csv");
}

namespace detail {

template <class M>
void execute(CellResult& cell, const M& manifold, const StochasticOracle& oracle, const ManifoldPoint& x0,
             RetractionKind retraction, std::int64_t record_every, RandomStream& rng,
             std::function<double(const ManifoldPoint&)> metric) {
  RunProbes probes;
  probes.problem_metric = std::move(metric);
  probes.algorithm = cell.plan.algorithm;
  RunResult res;
  if (cell.plan.rasa) {
    RasaConfig rc;
    rc.N = cell.plan.N;
    rc.beta = cell.plan.beta;
    rc.tau_mode = cell.plan.tau_mode;
    rc.tau_rule = cell.plan.tau_rule;
    rc.tau_scale = cell.plan.tau_scale;
    rc.transport = TransportMode::RetrVector;
    rc.retraction = retraction;
    rc.mu = cell.mu;
    rc.seed = static_cast<std::uint64_t>(cell.seed);
    rc.record_every = record_every;
    res = run(rc, oracle, manifold, x0, rng, probes);
  } else {
    RsgdConfig sc;
    sc.N = cell.plan.N;
    sc.step = cell.plan.step;
    sc.batch_size = cell.plan.batch;
    sc.retraction = retraction;
    sc.mu = cell.mu;
    sc.seed = static_cast<std::uint64_t>(cell.seed);
    sc.record_every = record_every;
    res = run_rsgd(sc, oracle, manifold, x0, rng, probes);
  }
  cell.records = std::move(res.trajectory);
  cell.failure = std::move(res.failure);
}

}  // namespace detail

/// Runs one (problem, algorithm, seed) cell. Nothing is written.
inline CellResult run_cell(const GridConfig& cfg, const ProblemSpec& p, const AlgorithmSpec& a, int seed) {
  CellResult cell;
  cell.problem = p;
  cell.plan = resolve_plan(p, a, cfg.full);
  cell.seed = seed;
  cell.d = problem_dimension(p);
  cell.csv_path = cell_csv_path(p, cell.plan.algorithm, seed);
  const std::int64_t record_every =
      std::max<std::int64_t>(1, (cell.plan.N + cfg.record_points - 1) / cfg.record_points);

  RandomStream prng = problem_stream(cfg.master_seed, p);
  RandomStream xrng = start_stream(cfg.master_seed, p, seed);
  RandomStream rng = cell_stream(cfg.master_seed, p, cell.plan.algorithm, seed);

  if (p.type == "kpca") {
    const KpcaProblem prob = make_kpca_problem(p.n, p.r, prng);
    const Stiefel st(p.n, p.r);
    const StochasticOracle oracle = make_kpca_oracle(prob);
    cell.mu = mu_schedule(*oracle.smoothness, static_cast<double>(cell.d), static_cast<double>(cell.plan.N), cfg.c_mu);
    const ManifoldPoint x0 = st.random_point(xrng);
    detail::execute(cell, st, oracle, x0, RetractionKind::Polar, record_every, rng,
                    [&prob](const ManifoldPoint& x) { return kpca_subspace_error(prob, x.value); });
  } else {
    const FixedRankPsdProblem prob = make_psd_problem(p.n, p.r, prng);
    const FixedRankPsd m(p.n, p.r);
    const StochasticOracle oracle = make_psd_oracle(prob);
    cell.mu = mu_schedule(*oracle.smoothness, static_cast<double>(cell.d), static_cast<double>(cell.plan.N), cfg.c_mu);
    const ManifoldPoint x0 = m.random_point(xrng);
    detail::execute(cell, m, oracle, x0, RetractionKind::EuclideanHorizontal, record_every, rng,
                    [&prob](const ManifoldPoint& G) { return psd_error(prob, G.value); });
  }
  return cell;
}

struct AggregateRow {
  std::string problem;
  Index n = 0;
  Index r = 0;
  std::string algorithm;
  std::int64_t iter = 0;
  double oracle_calls = 0;
  double f_gap = 0;
  double grad_norm = 0;
  double problem_metric = 0;
  double W = 0;
  int n_seeds = 0;
};

inline constexpr const char* kAggregateHeader =
    "problem,n,r,algorithm,iter,oracle_calls,f_gap,grad_norm,problem_metric,W,n_seeds";

/// Mean over seeds of every recorded row, matched by row position. Rows past
/// the end of a failed (shorter) run average over the seeds that reached them.
inline std::vector<AggregateRow> aggregate(const std::vector<CellResult>& cells) {
  std::map<std::pair<std::string, std::string>, std::vector<const CellResult*>> groups;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& c : cells) {
    auto key = std::make_pair(problem_key(c.problem), c.plan.algorithm);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&c);
  }
  std::vector<AggregateRow> rows;
  for (const auto& key : order) {
    const auto& group = groups[key];
    std::size_t len = 0;
    for (const auto* c : group) len = std::max(len, c->records.size());
    for (std::size_t i = 0; i < len; ++i) {
      AggregateRow row;
      row.problem = group.front()->problem.type;
      row.n = group.front()->problem.n;
      row.r = group.front()->problem.r;
      row.algorithm = key.second;
      for (const auto* c : group) {
        if (i >= c->records.size()) continue;
        const auto& rec = c->records[i];
        row.iter = rec.iter;
        row.oracle_calls += static_cast<double>(rec.oracle_calls);
        row.f_gap += rec.f_gap;
        row.grad_norm += rec.grad_norm;
        row.problem_metric += rec.problem_metric;
        row.W += rec.W;
        ++row.n_seeds;
      }
      const double k = row.n_seeds;
      row.oracle_calls /= k;
      row.f_gap /= k;
      row.grad_norm /= k;
      row.problem_metric /= k;
      row.W /= k;
      rows.push_back(row);
    }
  }
  return rows;
}

inline std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string out = std::string(kAggregateHeader) + "\n";
  for (const auto& r : rows) {
    out += r.problem + "," + std::to_string(r.n) + "," + std::to_string(r.r) + "," + r.algorithm + "," +
           std::to_string(r.iter) + "," + format_double(r.oracle_calls) + "," + format_double(r.f_gap) + "," +
           format_double(r.grad_norm) + "," + format_double(r.problem_metric) + "," + format_double(r.W) + "," +
           std::to_string(r.n_seeds) + "\n";
  }
  return out;
}

inline std::vector<AggregateRow> parse_aggregate_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind(kAggregateHeader, 0) != 0) {
    throw IoError("aggregate CSV has an unexpected header");
  }
  std::vector<AggregateRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 11) throw IoError("aggregate CSV row has " + std::to_string(f.size()) + " fields");
    AggregateRow r;
    r.problem = f[0];
    r.n = std::stoll(f[1]);
    r.r = std::stoll(f[2]);
    r.algorithm = f[3];
    r.iter = std::stoll(f[4]);
    r.oracle_calls = parse_double(f[5]);
    r.f_gap = parse_double(f[6]);
    r.grad_norm = parse_double(f[7]);
    r.problem_metric = parse_double(f[8]);
    r.W = parse_double(f[9]);
    r.n_seeds = std::stoi(f[10]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::string summary_json(const GridConfig& cfg, const std::vector<CellResult>& cells) {
  nlohmann::ordered_json root;
  root["master_seed"] = cfg.master_seed;
  root["scale"] = cfg.full ? "full" : "desk";
  root["cells"] = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    nlohmann::ordered_json j;
    j["problem"] = c.problem.type;
    j["n"] = c.problem.n;
    j["r"] = c.problem.r;
    j["d"] = c.d;
    j["algorithm"] = c.plan.algorithm;
    j["seed"] = c.seed;
    j["N"] = c.plan.N;
    j["mu"] = c.mu;
    if (c.plan.rasa) {
      j["beta"] = c.plan.beta;
      j["tau_scale"] = c.plan.tau_scale;
    } else {
      j["step"] = c.plan.step;
      j["batch"] = c.plan.batch;
    }
    j["status"] = c.failure ? "failed" : "ok";
    if (c.failure) j["failure"] = *c.failure;
    if (!c.records.empty()) {
      const auto& last = c.records.back();
      j["final_iter"] = last.iter;
      j["final_oracle_calls"] = last.oracle_calls;
      j["final_grad_norm"] = format_double(last.grad_norm);
      j["final_problem_metric"] = format_double(last.problem_metric);
    }
    j["csv"] = c.csv_path.generic_string();
    root["cells"].push_back(j);
  }
  return root.dump(2) + "\n";
}

struct GridTask {
  const ProblemSpec* problem;
  const AlgorithmSpec* algorithm;
  int seed;
};

inline std::vector<GridTask> grid_tasks(const GridConfig& cfg) {
  std::vector<GridTask> tasks;
  for (const auto& p : cfg.problems)
    for (const auto& a : cfg.algorithms)
      for (int s = 0; s < cfg.seeds; ++s) tasks.push_back({&p, &a, s});
  return tasks;
}

/// Runs every cell on up to `jobs` threads, writing each cell CSV as soon as
/// it finishes. Results come back in grid order regardless of `jobs`.
inline std::vector<CellResult> run_grid(const GridConfig& cfg, const std::filesystem::path& out_dir, int jobs,
                                        const std::function<void(const CellResult&)>& on_done = {}) {
  const auto tasks = grid_tasks(cfg);
  std::vector<CellResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;
  std::exception_ptr error;

  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        const auto& t = tasks[i];
        results[i] = run_cell(cfg, *t.problem, *t.algorithm, t.seed);
        write_file_atomic(out_dir / results[i].csv_path, to_csv(results[i].records));
        if (on_done) {
          std::lock_guard lock(report_mutex);
          on_done(results[i]);
        }
      } catch (...) {
        std::lock_guard lock(report_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);

  write_file_atomic(out_dir / "aggregate.csv", aggregate_csv(aggregate(results)));
  write_file_atomic(out_dir / "summary.json", summary_json(cfg, results));
  return results;
}

}  // namespace zorasa::bench
