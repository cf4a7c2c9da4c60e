#pragma once

#include "zorasa/manifolds/grassmann.hpp"
#include "zorasa/manifolds/sphere.hpp"
#include "zorasa/manifolds/stiefel.hpp"
#include "zorasa/oracle.hpp"
#include "zorasa/verify/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace zorasa::verify {

struct BoundCheckReport {
  std::string name;
  std::int64_t n_trials = 0;
  std::int64_t n_violations = 0;
  double max_ratio = 0.0;
  double fitted_constant = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<std::string, double>> extra;

  bool passed() const { return n_violations == 0; }

  void add_ratio(double ratio) {
    if (std::isfinite(ratio)) max_ratio = std::max(max_ratio, ratio);
  }

  std::string to_text() const {
    std::string out = name + " trials=" + std::to_string(n_trials) + " violations=" + std::to_string(n_violations) +
                      " max_ratio=" + fmt(max_ratio) + " fitted_constant=" + fmt(fitted_constant);
    for (const auto& [k, v] : extra) out += " " + k + "=" + fmt(v);
    return out;
  }

  std::string to_json() const {
    std::string out = "{\"name\":\"" + name + "\",\"n_trials\":" + std::to_string(n_trials) +
                      ",\"n_violations\":" + std::to_string(n_violations) + ",\"max_ratio\":" + json_num(max_ratio) +
                      ",\"fitted_constant\":" + json_num(fitted_constant);
    for (const auto& [k, v] : extra) out += ",\"" + k + "\":" + json_num(v);
    return out + "}";
  }

  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }
  static std::string json_num(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
};

inline constexpr double kExactSlack = 1e-8;

namespace detail {

template <class M>
TangentVector random_tangent(const M& m, const ManifoldPoint& x, double norm, RandomStream& rng) {
  TangentVector u = m.sample_tangent_gaussian(x, rng);
  const double n = u.value.norm();
  u.value *= norm / n;
  return u;
}

/// (upper bound on d(x, x+), reference parallel transport of v to x+) for
/// x+ = Retr_x(g). Stiefel uses the retraction-curve length and the ODE
/// transport along that curve.
inline std::pair<double, Matrix> assumption1_reference(const Sphere& m, const ManifoldPoint& x,
                                                       const ManifoldPoint& xp, const TangentVector&,
                                                       const TangentVector& v, RetractionKind,
                                                       const OdeTransportConfig&) {
  return {m.distance(x, xp), m.parallel_transport(x, xp, v).value};
}

inline std::pair<double, Matrix> assumption1_reference(const Grassmann& m, const ManifoldPoint& x,
                                                       const ManifoldPoint& xp, const TangentVector&,
                                                       const TangentVector& v, RetractionKind,
                                                       const OdeTransportConfig&) {
  return {m.distance(x, xp), m.parallel_transport(x, xp, v).value};
}

inline std::pair<double, Matrix> assumption1_reference(const Stiefel& m, const ManifoldPoint& x,
                                                       const ManifoldPoint&, const TangentVector& g,
                                                       const TangentVector& v, RetractionKind kind,
                                                       const OdeTransportConfig& ode) {
  const Curve curve = retraction_curve(m, x, g, kind);
  return {curve_length(curve), ode_transport_along_curve(m, curve, v, ode).value};
}

}  // namespace detail

/// Non-expansiveness of the projection vector transport T at x+ = Retr_x(g):
///   ||T(v)|| <= ||v||,  d(x, x+) <= ||g||,  ||T(v) - P(v)|| <= C ||v|| d(x, x+).
/// The first two are counted as violations; C is fitted by least squares and
/// its worst case reported as `max_C`.
template <class M>
BoundCheckReport check_assumption1(const M& manifold, RetractionKind kind, std::int64_t n_trials,
                                   double step_scale, RandomStream& rng, const OdeTransportConfig& ode = {}) {
  BoundCheckReport rep;
  rep.name = std::string("assumption1/") + to_string(manifold.descriptor().kind);
  rep.n_trials = n_trials;
  double num = 0.0, den = 0.0, max_c = 0.0;
  for (std::int64_t i = 0; i < n_trials; ++i) {
    const ManifoldPoint x = manifold.random_point(rng);
    const TangentVector g = detail::random_tangent(manifold, x, step_scale * (1.0 - rng.uniform()), rng);
    const TangentVector v = manifold.sample_tangent_gaussian(x, rng);
    const ManifoldPoint xp = manifold.retract(x, g, kind);
    const Matrix Tv = manifold.project_tangent(xp, v.value).value;

    const double nv = v.value.norm(), ng = g.value.norm();
    const double nT = Tv.norm();
    const auto [dist, Pv] = detail::assumption1_reference(manifold, x, xp, g, v, kind, ode);

    if (nT > nv * (1.0 + kExactSlack)) ++rep.n_violations;
    if (dist > ng * (1.0 + kExactSlack)) ++rep.n_violations;
    rep.add_ratio(nT / nv);
    rep.add_ratio(dist / ng);

    const double lhs = (Tv - Pv).norm();
    const double rhs = nv * dist;
    num += lhs * rhs;
    den += rhs * rhs;
    if (rhs > 0) max_c = std::max(max_c, lhs / rhs);
  }
  rep.fitted_constant = den > 0 ? num / den : 0.0;
  rep.extra.emplace_back("max_C", max_c);
  return rep;
}

/// Log-log slope of d(Retr_x(t xi), Exp_x(t xi)) over t = 2^-1 .. 2^-6 with
/// ||xi|| = 1. A trial violates when its slope is below `min_slope`.
template <class M>
BoundCheckReport check_second_order_retraction(const M& manifold, RetractionKind kind, std::int64_t n_trials,
                                               RandomStream& rng, double min_slope = 1.9) {
  BoundCheckReport rep;
  rep.name = std::string("retraction-order/") + to_string(manifold.descriptor().kind) + "/" + to_string(kind);
  rep.n_trials = n_trials;
  double worst_slope = std::numeric_limits<double>::infinity();
  double max_c = 0.0;
  for (std::int64_t i = 0; i < n_trials; ++i) {
    const ManifoldPoint x = manifold.random_point(rng);
    const TangentVector xi = detail::random_tangent(manifold, x, 1.0, rng);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int j = 1; j <= 6; ++j) {
      const double t = std::ldexp(1.0, -j);
      const TangentVector step{x.value, t * xi.value};
      const double dist = manifold.distance(manifold.retract(x, step, kind), manifold.exp_map(x, step));
      max_c = std::max(max_c, dist / (t * t));
      const double lx = std::log(t), ly = std::log(std::max(dist, 1e-300));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    worst_slope = std::min(worst_slope, slope);
    if (slope < min_slope) ++rep.n_violations;
    rep.add_ratio(min_slope / slope);
  }
  rep.fitted_constant = max_c;
  rep.extra.emplace_back("min_slope", worst_slope);
  return rep;
}

/// ||Theta||_F <= ||G||_F for [Y] the QR retraction of X + G, X^T G = 0.
/// Scales of G cycle through {0.01, 0.1, 1, 10}.
inline BoundCheckReport check_principal_angle_lemma(Index n, Index r, std::int64_t n_trials, RandomStream& rng) {
  const Grassmann gr(n, r);
  static const double scales[4] = {0.01, 0.1, 1.0, 10.0};
  BoundCheckReport rep;
  rep.name = "principal-angle/" + std::to_string(n) + "x" + std::to_string(r);
  rep.n_trials = n_trials;
  double max_fit = 0.0;
  for (std::int64_t i = 0; i < n_trials; ++i) {
    const ManifoldPoint x = gr.random_point(rng);
    const TangentVector G = detail::random_tangent(gr, x, scales[i % 4] * (1.0 - 0.5 * rng.uniform()), rng);
    const ManifoldPoint y = gr.retract(x, G, RetractionKind::QR);
    const double theta = Grassmann::principal_angles(x.value, y.value).frobenius();
    const double g = G.value.norm();
    if (theta > g * (1.0 + kExactSlack)) ++rep.n_violations;
    rep.add_ratio(theta / g);
    max_fit = std::max(max_fit, theta / g);
  }
  rep.fitted_constant = max_fit;
  return rep;
}

namespace detail {

/// (d(x, y), P_x^y v, projection transport of v) for y reached from x along xi.
inline std::tuple<double, Matrix, Matrix> transport_pair(const Sphere& m, const ManifoldPoint& x,
                                                         const TangentVector& xi, const TangentVector& v,
                                                         const OdeTransportConfig&) {
  const ManifoldPoint y = m.retract(x, xi, RetractionKind::Projection);
  return {m.distance(x, y), m.parallel_transport(x, y, v).value, m.project_tangent(y, v.value).value};
}

inline std::tuple<double, Matrix, Matrix> transport_pair(const Grassmann& m, const ManifoldPoint& x,
                                                         const TangentVector& xi, const TangentVector& v,
                                                         const OdeTransportConfig&) {
  const ManifoldPoint y = m.retract(x, xi, RetractionKind::Projection);
  return {m.distance(x, y), m.parallel_transport(x, y, v).value, m.project_tangent(y, v.value).value};
}

/// Stiefel: y = Exp_x(xi), P from the ODE along the geodesic and ||xi|| as
/// the distance (an upper bound).
inline std::tuple<double, Matrix, Matrix> transport_pair(const Stiefel& m, const ManifoldPoint& x,
                                                         const TangentVector& xi, const TangentVector& v,
                                                         const OdeTransportConfig& ode) {
  const TangentVector pv = ode_transport_along(m, x, xi, v, ode);
  const ManifoldPoint y{pv.base};
  return {xi.value.norm(), pv.value, m.project_tangent(y, v.value).value};
}

}  // namespace detail

/// Worst ratio ||proj_y(v) - P_x^y(v)|| / (||v|| d(x, y)) over random x, v and
/// ||xi|| <= step_scale. With `constant`, trials above constant * (1 + 1e-8)
/// count as violations; otherwise the check only reports.
template <class M>
BoundCheckReport check_transport_error_bound(const M& manifold, std::int64_t n_trials, RandomStream& rng,
                                             std::optional<double> constant = std::nullopt,
                                             double step_scale = 1.0, const OdeTransportConfig& ode = {}) {
  BoundCheckReport rep;
  rep.name = std::string("transport-bound/") + to_string(manifold.descriptor().kind);
  rep.n_trials = n_trials;
  double worst = 0.0;
  for (std::int64_t i = 0; i < n_trials; ++i) {
    const ManifoldPoint x = manifold.random_point(rng);
    const TangentVector xi = detail::random_tangent(manifold, x, step_scale * (1.0 - rng.uniform()), rng);
    const TangentVector v = manifold.sample_tangent_gaussian(x, rng);
    const auto [dist, Pv, Tv] = detail::transport_pair(manifold, x, xi, v, ode);
    const double lhs = (Tv - Pv).norm();
    const double rhs = v.value.norm() * dist;
    if (rhs <= 0) continue;
    const double c = lhs / rhs;
    worst = std::max(worst, c);
    if (constant) {
      rep.add_ratio(c / *constant);
      if (lhs > *constant * rhs * (1.0 + kExactSlack)) ++rep.n_violations;
    } else {
      rep.add_ratio(c);
    }
  }
  rep.fitted_constant = worst;
  if (constant) rep.extra.emplace_back("constant", *constant);
  return rep;
}

/// Closed-form transport isometry: |<Pu, Pv> - <u, v>| over random draws,
/// along geodesics with ||xi|| <= 1. The report's max_ratio is the worst
/// defect divided by `tol`.
template <ParallelTransportManifold M>
BoundCheckReport check_transport_isometry(const M& manifold, std::int64_t n_trials, RandomStream& rng,
                                          double tol = 1e-10) {
  BoundCheckReport rep;
  rep.name = std::string("transport-isometry/") + to_string(manifold.descriptor().kind);
  rep.n_trials = n_trials;
  double worst = 0.0;
  for (std::int64_t i = 0; i < n_trials; ++i) {
    const ManifoldPoint x = manifold.random_point(rng);
    const TangentVector xi = detail::random_tangent(manifold, x, 1.0 - rng.uniform(), rng);
    const TangentVector u = manifold.sample_tangent_gaussian(x, rng);
    const TangentVector v = manifold.sample_tangent_gaussian(x, rng);
    const Matrix Pu = manifold.transport_along(x, xi, u).value;
    const Matrix Pv = manifold.transport_along(x, xi, v).value;
    const double scale = u.value.norm() * v.value.norm();
    const double defect = std::abs(linalg::frobenius_inner(Pu, Pv) - linalg::frobenius_inner(u.value, v.value)) / scale;
    worst = std::max(worst, defect);
    if (defect > tol) ++rep.n_violations;
  }
  rep.max_ratio = worst / tol;
  rep.fitted_constant = worst;
  return rep;
}

/// ODE transport against the closed form along random geodesics. Reports the
/// worst relative error at `steps` and the worst ratio err(steps/2)/err(steps)
/// bounds (min and max) as the observed convergence order evidence.
template <ParallelTransportManifold M>
BoundCheckReport check_ode_transport(const M& manifold, std::int64_t n_trials, RandomStream& rng, int steps = 256,
                                     double tol = 1e-8) {
  BoundCheckReport rep;
  rep.name = std::string("ode-transport/") + to_string(manifold.descriptor().kind);
  rep.n_trials = n_trials;
  double worst = 0.0;
  double min_ratio = std::numeric_limits<double>::infinity(), max_ratio = 0.0;
  for (std::int64_t i = 0; i < n_trials; ++i) {
    const ManifoldPoint x = manifold.random_point(rng);
    const TangentVector xi = detail::random_tangent(manifold, x, 0.5 + rng.uniform(), rng);
    const TangentVector v = manifold.sample_tangent_gaussian(x, rng);
    const Matrix ref = manifold.transport_along(x, xi, v).value;
    const double nv = v.value.norm();
    const double err = (ode_transport_along(manifold, x, xi, v, {steps, 1e-6}).value - ref).norm() / nv;
    worst = std::max(worst, err);
    if (err > tol) ++rep.n_violations;

    // order estimate at coarse resolutions, where the error is far above rounding
    const double e16 = (ode_transport_along(manifold, x, xi, v, {16, 1.0}).value - ref).norm() / nv;
    const double e32 = (ode_transport_along(manifold, x, xi, v, {32, 1.0}).value - ref).norm() / nv;
    const double ratio = e16 / e32;
    min_ratio = std::min(min_ratio, ratio);
    max_ratio = std::max(max_ratio, ratio);
  }
  rep.max_ratio = worst / tol;
  rep.fitted_constant = worst;
  rep.extra.emplace_back("min_halving_ratio", min_ratio);
  rep.extra.emplace_back("max_halving_ratio", max_ratio);
  return rep;
}

/// Matrix-exponential Stiefel geodesic against RK4 integration of
/// X'' = -X (X'^T X') at t = 1 with ||u|| <= 1.
inline BoundCheckReport check_stiefel_geodesic(Index n, Index p, std::int64_t n_trials, RandomStream& rng,
                                               int steps = 2000, double tol = 1e-6) {
  const Stiefel st(n, p);
  BoundCheckReport rep;
  rep.name = "stiefel-geodesic/" + std::to_string(n) + "x" + std::to_string(p);
  rep.n_trials = n_trials;
  double worst = 0.0;
  for (std::int64_t i = 0; i < n_trials; ++i) {
    const ManifoldPoint x = st.random_point(rng);
    const TangentVector u = detail::random_tangent(st, x, 1.0 - rng.uniform(), rng);
    const Matrix closed = st.geodesic(x, u, 1.0).first;
    const Matrix ode = stiefel_geodesic_ode(x.value, u.value, 1.0, steps);
    const double err = (closed - ode).norm();
    worst = std::max(worst, err);
    if (err > tol) ++rep.n_violations;
  }
  rep.max_ratio = worst / tol;
  rep.fitted_constant = worst;
  return rep;
}

/// Smoothing-estimator moments against the bounds
///   ||E G - grad f||^2 <= mu^2 L^2 (d+3)^3 / 4                        (exp map)
///   E ||G||^2          <= mu^2 L^2 (d+6)^3 + 2(d+4) ||grad f||^2        (exp map)
///   E ||G - grad f||^2 <= mu^2 L^2 (d+6)^3 + 8(d+4)(sigma^2 + ||grad f||^2)/m  (exp map)
///   E ||G||^4          <= mu^4 L^4 (d+12)^6 / 2 + 3 d^2 ||grad f||^4   (retraction)
/// evaluated at each of `points`. Monte Carlo slack is three standard errors;
/// for the bias term it is 3 tr(Cov G)/n, three times the expected value of
/// the squared sampling error of the mean. fitted_constant is the worst
/// E||G||^2 / ||grad f||^2 (resp. E||G||^4 / ||grad f||^4).
template <Manifold M>
std::vector<BoundCheckReport> check_estimator_bounds(const StochasticOracle& oracle, const M& manifold,
                                                     const std::vector<ManifoldPoint>& points, double mu,
                                                     std::int64_t batch, std::int64_t n_mc, RandomStream& rng,
                                                     RetractionKind retraction = RetractionKind::Projection) {
  if (!oracle.smoothness) throw DomainError("check_estimator_bounds: oracle has no smoothness constant");
  const double L = *oracle.smoothness;
  const double sigma = oracle.noise_level.value_or(0.0);
  const double d = static_cast<double>(manifold.descriptor().intrinsic_dim);
  const double m = static_cast<double>(batch);

  std::vector<BoundCheckReport> reps(4);
  reps[0].name = "estimator/bias";
  reps[1].name = "estimator/second-moment";
  reps[2].name = "estimator/mean-sq-error";
  reps[3].name = "estimator/fourth-moment";
  reps[1].fitted_constant = reps[3].fitted_constant = 0.0;
  for (auto& r : reps) r.n_trials = static_cast<std::int64_t>(points.size());

  auto tally = [](BoundCheckReport& r, double lhs, double rhs, double slack) {
    if (lhs > rhs + slack) ++r.n_violations;
    r.add_ratio(lhs / rhs);
  };

  for (const auto& x : points) {
    SmoothingConfig exp_cfg{mu, batch, MapKind::ExpMap, retraction};
    const MomentEstimate e = estimate_moments(oracle, manifold, x, exp_cfg, n_mc, rng);
    const double g2 = e.grad_norm * e.grad_norm;
    const double mu2L2 = mu * mu * L * L;

    tally(reps[0], e.bias_sq, mu2L2 * std::pow(d + 3, 3) / 4.0, 3.0 * e.bias_sq_noise);
    tally(reps[1], e.mean_sq_norm, mu2L2 * std::pow(d + 6, 3) + 2.0 * (d + 4) * g2, 3.0 * e.mean_sq_norm_se);
    tally(reps[2], e.mean_sq_error, mu2L2 * std::pow(d + 6, 3) + 8.0 * (d + 4) * (sigma * sigma + g2) / m,
          3.0 * e.mean_sq_error_se);
    if (g2 > 0) reps[1].fitted_constant = std::max(reps[1].fitted_constant, e.mean_sq_norm / g2);

    SmoothingConfig retr_cfg{mu, batch, MapKind::Retraction, retraction};
    const MomentEstimate r = estimate_moments(oracle, manifold, x, retr_cfg, n_mc, rng);
    const double rg4 = std::pow(r.grad_norm, 4);
    tally(reps[3], r.fourth_moment, std::pow(mu * L, 4) * std::pow(d + 12, 6) / 2.0 + 3.0 * d * d * rg4,
          3.0 * r.fourth_moment_se);
    if (rg4 > 0) reps[3].fitted_constant = std::max(reps[3].fitted_constant, r.fourth_moment / rg4);
  }
  return reps;
}

}  // namespace zorasa::verify
