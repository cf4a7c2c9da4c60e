#pragma once

#include "zorasa/manifold.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace zorasa {

/// Opaque noise draw passed back to the oracle; each problem decides what it
/// holds (a data vector, or nothing for deterministic objectives).
using NoiseSample = Vector;

/// Noisy function values F(x, xi) with E_xi F(x, xi) = f(x).
///
/// `eval` must be deterministic given (x, xi). The remaining members are
/// optional diagnostics that the optimizer itself never reads.
struct StochasticOracle {
  std::function<double(const ManifoldPoint&, const NoiseSample&)> eval;
  std::function<NoiseSample(RandomStream&)> sampler;

  std::function<TangentVector(const ManifoldPoint&)> true_gradient;
  std::function<double(const ManifoldPoint&)> objective;
  std::optional<double> optimal_value;

  // assumption-level constants, used only by verification code
  std::optional<double> smoothness;   // L
  std::optional<double> noise_level;  // sigma
};

enum class MapKind { ExpMap, Retraction };

struct SmoothingConfig {
  double mu = 1e-4;
  std::int64_t batch_size = 1;
  MapKind map_kind = MapKind::ExpMap;
  RetractionKind retraction = RetractionKind::Projection;

  void validate() const {
    if (!(mu > 0.0)) throw DomainError("SmoothingConfig: mu must be positive");
    if (batch_size < 1) throw DomainError("SmoothingConfig: batch_size must be >= 1");
  }
};

struct ZoGradEstimate {
  TangentVector direction;
  std::int64_t oracle_calls = 0;
  double mu_used = 0.0;
};

/// Gaussian-smoothing estimator
///
///   G(x) = (1/m) sum_i (F(M_x(mu u_i), xi_i) - F(x, xi_i)) / mu * u_i,
///
/// where M_x is Exp_x or a retraction and u_i is standard normal on T_x M.
/// Both evaluations of sample i share xi_i. Per sample, xi_i is drawn before u_i.
template <Manifold M>
ZoGradEstimate estimate_gradient(const StochasticOracle& oracle, const M& manifold,
                                 const ManifoldPoint& x, const SmoothingConfig& cfg,
                                 RandomStream& rng) {
  cfg.validate();
  Matrix acc = Matrix::Zero(x.value.rows(), x.value.cols());
  for (std::int64_t i = 0; i < cfg.batch_size; ++i) {
    const NoiseSample xi = oracle.sampler ? oracle.sampler(rng) : NoiseSample();
    const TangentVector u = manifold.sample_tangent_gaussian(x, rng);
    const TangentVector step{x.value, cfg.mu * u.value};
    const ManifoldPoint moved = cfg.map_kind == MapKind::ExpMap
                                    ? manifold.exp_map(x, step)
                                    : manifold.retract(x, step, cfg.retraction);
    const double f_moved = oracle.eval(moved, xi);
    const double f_base = oracle.eval(x, xi);
    if (!std::isfinite(f_moved) || !std::isfinite(f_base)) {
      throw OracleValueError("oracle returned a non-finite value");
    }
    acc += ((f_moved - f_base) / cfg.mu) * u.value;
  }
  acc /= static_cast<double>(cfg.batch_size);
  return {TangentVector{x.value, std::move(acc)}, 2 * cfg.batch_size, cfg.mu};
}

/// Monte Carlo moments of the estimator at a fixed point, with standard errors.
struct MomentEstimate {
  std::int64_t n_samples = 0;
  double grad_norm = 0.0;           // ||grad f(x)||
  double mean_sq_norm = 0.0;        // E ||G||^2
  double mean_sq_norm_se = 0.0;
  double mean_sq_error = 0.0;       // E ||G - grad f||^2
  double mean_sq_error_se = 0.0;
  double fourth_moment = 0.0;       // E ||G||^4
  double fourth_moment_se = 0.0;
  double bias_sq = 0.0;             // ||mean(G) - grad f||^2
  double bias_sq_noise = 0.0;       // tr Cov(G) / n, the expected MC contribution to bias_sq
  Matrix mean_direction;
};

template <Manifold M>
MomentEstimate estimate_moments(const StochasticOracle& oracle, const M& manifold,
                                const ManifoldPoint& x, const SmoothingConfig& cfg,
                                std::int64_t n_samples, RandomStream& rng) {
  if (!oracle.true_gradient) throw DomainError("estimate_moments: oracle has no true_gradient");
  if (n_samples < 2) throw DomainError("estimate_moments: need at least two samples");
  const Matrix grad = oracle.true_gradient(x).value;

  Matrix sum = Matrix::Zero(grad.rows(), grad.cols());
  double s2 = 0, s2sq = 0, e2 = 0, e2sq = 0, s4 = 0, s4sq = 0;
  for (std::int64_t k = 0; k < n_samples; ++k) {
    const Matrix G = estimate_gradient(oracle, manifold, x, cfg, rng).direction.value;
    sum += G;
    const double sq = G.squaredNorm();
    const double err = (G - grad).squaredNorm();
    s2 += sq;
    s2sq += sq * sq;
    e2 += err;
    e2sq += err * err;
    s4 += sq * sq;
    s4sq += sq * sq * sq * sq;
  }
  const double n = static_cast<double>(n_samples);
  auto se = [n](double s, double ssq) {
    const double mean = s / n;
    const double var = std::max(0.0, (ssq / n - mean * mean) * n / (n - 1.0));
    return std::sqrt(var / n);
  };

  MomentEstimate out;
  out.n_samples = n_samples;
  out.grad_norm = grad.norm();
  out.mean_sq_norm = s2 / n;
  out.mean_sq_norm_se = se(s2, s2sq);
  out.mean_sq_error = e2 / n;
  out.mean_sq_error_se = se(e2, e2sq);
  out.fourth_moment = s4 / n;
  out.fourth_moment_se = se(s4, s4sq);
  out.mean_direction = sum / n;
  out.bias_sq = (out.mean_direction - grad).squaredNorm();
  // E||G - mean||^2 = E||G||^2 - ||mean||^2, unbiased-corrected
  const double trace_cov = std::max(0.0, (out.mean_sq_norm - out.mean_direction.squaredNorm()) * n / (n - 1.0));
  out.bias_sq_noise = trace_cov / n;
  return out;
}

/// mu = c_mu / (L d^{3/2} N^{1/4}), floored at 1e-8 so finite differences stay
/// above double-precision cancellation.
inline double mu_schedule(double L_est, double d, double N, double c_mu) {
  if (!(L_est > 0 && d > 0 && N > 0 && c_mu > 0)) {
    throw DomainError("mu_schedule: all arguments must be positive");
  }
  const double mu = c_mu / (L_est * std::pow(d, 1.5) * std::pow(N, 0.25));
  return std::max(mu, 1e-8);
}

}  // namespace zorasa
