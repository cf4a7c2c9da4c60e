#pragma once

#include "zorasa/manifold.hpp"
#include "zorasa/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace zorasa {

enum class TauMode { LargeBatch, SingleSample };
enum class TransportMode { ExpParallel, RetrVector };

inline const char* to_string(TauMode m) { return m == TauMode::LargeBatch ? "large-batch" : "single-sample"; }
inline const char* to_string(TransportMode m) { return m == TransportMode::ExpParallel ? "exp-parallel" : "retr-vector"; }

struct RasaConfig {
  std::int64_t N = 1000;
  double beta = 1.0;
  TauMode tau_mode = TauMode::SingleSample;
  double tau_scale = 1.0;  // tau_k = tau_scale / sqrt(N) or tau_scale / sqrt(d N) for k >= 1
  // which tau formula to use when it differs from the batch regime in tau_mode
  std::optional<TauMode> tau_rule;
  TransportMode transport = TransportMode::RetrVector;
  RetractionKind retraction = RetractionKind::Projection;
  double mu = 1e-4;
  std::uint64_t seed = 0;
  std::int64_t record_every = 1;

  void validate() const {
    if (N < 0) throw DomainError("RasaConfig: N must be >= 0");
    if (!(beta > 0)) throw DomainError("RasaConfig: beta must be positive");
    if (!(tau_scale > 0)) throw DomainError("RasaConfig: tau_scale must be positive");
    if (!(mu > 0)) throw DomainError("RasaConfig: mu must be positive");
    if (record_every < 1) throw DomainError("RasaConfig: record_every must be >= 1");
  }
};

struct RasaState {
  std::int64_t k = 0;
  ManifoldPoint x;
  TangentVector g;
  double gamma = 1.0;
  std::int64_t oracle_calls_total = 0;
};

struct ExperimentRecord {
  std::int64_t iter = 0;
  std::int64_t oracle_calls = 0;
  double f_gap = 0.0;
  double grad_norm = 0.0;
  double problem_metric = 0.0;
  double W = 0.0;
  double mu = 0.0;
  std::uint64_t seed = 0;
  std::string algorithm;
};

/// Optional diagnostics hooks used when filling ExperimentRecords. Missing
/// hooks produce NaN in the corresponding column.
struct RunProbes {
  std::function<double(const ManifoldPoint&)> problem_metric;
  std::string algorithm = "zo-rasa";
};

struct RunResult {
  std::vector<ExperimentRecord> trajectory;
  RasaState final;
  std::optional<std::string> failure;
};

inline double tau_of(std::int64_t k, const RasaConfig& cfg, Index d) {
  if (k == 0) return 1.0;
  const double N = static_cast<double>(std::max<std::int64_t>(cfg.N, 1));
  const TauMode rule = cfg.tau_rule.value_or(cfg.tau_mode);
  const double denom = rule == TauMode::LargeBatch ? std::sqrt(N) : std::sqrt(static_cast<double>(d) * N);
  return std::min(1.0, cfg.tau_scale / denom);
}

/// Gamma_{k+1} from Gamma_k; the caller handles Gamma_0 = Gamma_1 = 1.
inline double gamma_update(double gamma_k, double tau_k) { return gamma_k * (1.0 - tau_k * tau_k); }

/// Gamma_0 .. Gamma_N for a schedule.
inline std::vector<double> gamma_sequence(const RasaConfig& cfg, Index d) {
  std::vector<double> gamma(static_cast<std::size_t>(cfg.N) + 1, 1.0);
  for (std::int64_t k = 1; k < cfg.N; ++k) {
    gamma[static_cast<std::size_t>(k + 1)] = gamma_update(gamma[static_cast<std::size_t>(k)], tau_of(k, cfg, d));
  }
  return gamma;
}

inline std::int64_t batch_size_of(std::int64_t k, const RasaConfig& cfg, Index d) {
  if (cfg.tau_mode == TauMode::LargeBatch) return 8 * (static_cast<std::int64_t>(d) + 4);
  return k == 0 ? static_cast<std::int64_t>(d) : 1;
}

/// Oracle calls of a full run: 2 (m_0 + sum_{k=1}^{N-1} m_k). The k = 0 step
/// reuses g^0 as its estimate.
inline std::int64_t total_oracle_calls(const RasaConfig& cfg, Index d) {
  std::int64_t calls = 2 * batch_size_of(0, cfg, d);
  for (std::int64_t k = 1; k < cfg.N; ++k) calls += 2 * batch_size_of(k, cfg, d);
  return calls;
}

inline SmoothingConfig smoothing_for(const RasaConfig& cfg, std::int64_t batch) {
  SmoothingConfig s;
  s.mu = cfg.mu;
  s.batch_size = batch;
  s.map_kind = cfg.transport == TransportMode::ExpParallel ? MapKind::ExpMap : MapKind::Retraction;
  s.retraction = cfg.retraction;
  return s;
}

template <Manifold M>
void check_transport_mode(const M& manifold, const RasaConfig& cfg) {
  if (cfg.transport == TransportMode::ExpParallel) {
    if constexpr (ParallelTransportManifold<M>) {
      if (!manifold.has_closed_form_transport()) {
        throw UnsupportedOperation(std::string("exp-parallel needs closed-form parallel transport, unavailable on ") +
                                   to_string(manifold.descriptor().kind));
      }
    } else {
      throw UnsupportedOperation(std::string("exp-parallel is unavailable on ") +
                                 to_string(manifold.descriptor().kind));
    }
  } else if (!manifold.supports(cfg.retraction)) {
    throw UnsupportedRetraction(std::string("retraction '") + to_string(cfg.retraction) + "' is not supported on " +
                                to_string(manifold.descriptor().kind));
  }
}

/// k = 0 state: g^0 = G_mu(x^0) with batch m_0.
template <Manifold M>
RasaState initialize(const RasaConfig& cfg, const StochasticOracle& oracle, const M& manifold,
                     const ManifoldPoint& x0, RandomStream& rng) {
  cfg.validate();
  check_transport_mode(manifold, cfg);
  const Index d = manifold.descriptor().intrinsic_dim;
  auto est = estimate_gradient(oracle, manifold, x0, smoothing_for(cfg, batch_size_of(0, cfg, d)), rng);
  RasaState s;
  s.k = 0;
  s.x = x0;
  s.g = std::move(est.direction);
  s.gamma = 1.0;
  s.oracle_calls_total = est.oracle_calls;
  return s;
}

/// One iteration:
///   x^{k+1} = move(x^k, -t_k g^k),
///   g^{k+1} = T((1 - tau_k) g^k + tau_k G^k),
/// with move/T either Exp and parallel transport or a retraction and the
/// projection vector transport. T is linear, so transporting the combination
/// equals combining the transports.
template <Manifold M>
RasaState rasa_step(const RasaState& state, const RasaConfig& cfg, const StochasticOracle& oracle,
                    const M& manifold, RandomStream& rng) {
  const Index d = manifold.descriptor().intrinsic_dim;
  const double tau = tau_of(state.k, cfg, d);
  const double t = tau / cfg.beta;

  RasaState next;
  next.k = state.k + 1;
  next.oracle_calls_total = state.oracle_calls_total;

  Matrix G;
  if (state.k == 0) {
    G = state.g.value;
  } else {
    auto est = estimate_gradient(oracle, manifold, state.x, smoothing_for(cfg, batch_size_of(state.k, cfg, d)), rng);
    next.oracle_calls_total += est.oracle_calls;
    G = std::move(est.direction.value);
  }
  const TangentVector combo{state.x.value, (1.0 - tau) * state.g.value + tau * G};
  const TangentVector step{state.x.value, -t * state.g.value};

  if (cfg.transport == TransportMode::ExpParallel) {
    if constexpr (ParallelTransportManifold<M>) {
      TangentVector moved = manifold.transport_along(state.x, step, combo);
      next.x = ManifoldPoint{moved.base};
      next.g = std::move(moved);
    } else {
      throw UnsupportedOperation("exp-parallel is unavailable on this manifold");
    }
  } else {
    next.x = manifold.retract(state.x, step, cfg.retraction);
    next.g = manifold.project_tangent(next.x, combo.value);
  }
  next.gamma = state.k == 0 ? 1.0 : gamma_update(state.gamma, tau);
  return next;
}

namespace detail {

inline double nan() { return std::numeric_limits<double>::quiet_NaN(); }

inline ExperimentRecord make_record(std::int64_t iter, std::int64_t calls, const ManifoldPoint& x,
                                    double g_norm_sq, double beta, double mu, std::uint64_t seed,
                                    const StochasticOracle& oracle, const RunProbes& probes) {
  ExperimentRecord r;
  r.iter = iter;
  r.oracle_calls = calls;
  r.f_gap = (oracle.objective && oracle.optimal_value) ? oracle.objective(x) - *oracle.optimal_value : nan();
  r.grad_norm = oracle.true_gradient ? oracle.true_gradient(x).value.norm() : nan();
  r.problem_metric = probes.problem_metric ? probes.problem_metric(x) : nan();
  r.W = std::isfinite(r.f_gap) ? r.f_gap + (beta > 0 ? g_norm_sq / (2.0 * beta) : 0.0) : nan();
  r.mu = mu;
  r.seed = seed;
  r.algorithm = probes.algorithm;
  return r;
}

}  // namespace detail

/// Runs N iterations, recording k = 0, every `record_every` iterations and
/// k = N. A library error stops the run; the partial trajectory is kept and
/// the message stored in `failure`.
template <Manifold M>
RunResult run(const RasaConfig& cfg, const StochasticOracle& oracle, const M& manifold,
              const ManifoldPoint& x0, RandomStream& rng, const RunProbes& probes = {}) {
  RunResult out;
  auto record = [&](const RasaState& s) {
    out.trajectory.push_back(detail::make_record(s.k, s.oracle_calls_total, s.x, s.g.value.squaredNorm(), cfg.beta,
                                                 cfg.mu, cfg.seed, oracle, probes));
  };
  RasaState s;
  try {
    s = initialize(cfg, oracle, manifold, x0, rng);
  } catch (const Error& e) {
    out.final.x = x0;
    out.failure = e.what();
    return out;
  }
  record(s);
  try {
    while (s.k < cfg.N) {
      s = rasa_step(s, cfg, oracle, manifold, rng);
      if (s.k % cfg.record_every == 0 || s.k == cfg.N) record(s);
    }
  } catch (const Error& e) {
    out.failure = "iteration " + std::to_string(s.k) + ": " + e.what();
  }
  out.final = std::move(s);
  return out;
}

/// P(R = k) proportional to tau_k, k = 0..N.
inline std::vector<double> output_weights(const RasaConfig& cfg, Index d) {
  std::vector<double> w(static_cast<std::size_t>(cfg.N) + 1);
  double total = 0.0;
  for (std::int64_t k = 0; k <= cfg.N; ++k) total += (w[static_cast<std::size_t>(k)] = tau_of(k, cfg, d));
  for (double& v : w) v /= total;
  return w;
}

inline std::int64_t sample_output_iterate(const RasaConfig& cfg, Index d, RandomStream& rng) {
  const auto w = output_weights(cfg, d);
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    acc += w[k];
    if (u < acc) return static_cast<std::int64_t>(k);
  }
  return static_cast<std::int64_t>(w.size()) - 1;
}

// Zo-RSGD baseline

struct RsgdConfig {
  std::int64_t N = 1000;
  double step = 1e-3;
  std::int64_t batch_size = 1;
  RetractionKind retraction = RetractionKind::Projection;
  double mu = 1e-4;
  std::uint64_t seed = 0;
  std::int64_t record_every = 1;

  void validate() const {
    if (N < 0) throw DomainError("RsgdConfig: N must be >= 0");
    if (!(step >= 0)) throw DomainError("RsgdConfig: step must be >= 0");
    if (batch_size < 1) throw DomainError("RsgdConfig: batch_size must be >= 1");
    if (!(mu > 0)) throw DomainError("RsgdConfig: mu must be positive");
    if (record_every < 1) throw DomainError("RsgdConfig: record_every must be >= 1");
  }
};

/// x^{k+1} = Retr_x(-t G).
template <Manifold M>
ManifoldPoint rsgd_step(const M& manifold, const ManifoldPoint& x, double t, const TangentVector& estimate,
                        RetractionKind kind) {
  return manifold.retract(x, {x.value, -t * estimate.value}, kind);
}

template <Manifold M>
RunResult run_rsgd(const RsgdConfig& cfg, const StochasticOracle& oracle, const M& manifold,
                   const ManifoldPoint& x0, RandomStream& rng, RunProbes probes = {}) {
  cfg.validate();
  if (probes.algorithm == "zo-rasa") probes.algorithm = "zo-rsgd";
  SmoothingConfig sc;
  sc.mu = cfg.mu;
  sc.batch_size = cfg.batch_size;
  sc.map_kind = MapKind::Retraction;
  sc.retraction = cfg.retraction;

  RunResult out;
  RasaState s;
  s.x = x0;
  s.g = manifold.zero_vector(x0);
  auto record = [&] {
    out.trajectory.push_back(
        detail::make_record(s.k, s.oracle_calls_total, s.x, 0.0, 0.0, cfg.mu, cfg.seed, oracle, probes));
  };
  record();
  try {
    while (s.k < cfg.N) {
      auto est = estimate_gradient(oracle, manifold, s.x, sc, rng);
      s.x = rsgd_step(manifold, s.x, cfg.step, est.direction, cfg.retraction);
      s.oracle_calls_total += est.oracle_calls;
      ++s.k;
      if (s.k % cfg.record_every == 0 || s.k == cfg.N) record();
    }
  } catch (const Error& e) {
    out.failure = "iteration " + std::to_string(s.k) + ": " + e.what();
  }
  s.g = manifold.zero_vector(s.x);
  out.final = std::move(s);
  return out;
}

}  // namespace zorasa
