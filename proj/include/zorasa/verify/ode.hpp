#pragma once

#include "zorasa/manifolds/grassmann.hpp"
#include "zorasa/manifolds/sphere.hpp"
#include "zorasa/manifolds/stiefel.hpp"

#include <functional>
#include <utility>

namespace zorasa::verify {

struct OdeTransportConfig {
  int steps = 256;
  double tol = 1e-8;

  void validate() const {
    if (steps < 16) throw DomainError("OdeTransportConfig: steps must be >= 16");
    if (!(tol > 0)) throw DomainError("OdeTransportConfig: tol must be positive");
  }
};

/// t -> (position, velocity)
using Curve = std::function<std::pair<Matrix, Matrix>(double)>;

/// d/dt of the tangent projection along the curve, applied to v.
using ProjectionRate = std::function<Matrix(const Matrix& pos, const Matrix& vel, const Matrix& v)>;

/// RK4 for v' = (dP/dt) v on [0, 1]. Tangent fields satisfy v = P v, and the
/// covariant derivative P v' vanishes, which leaves exactly this equation.
inline Matrix rk4_transport(const Curve& curve, const ProjectionRate& rate, const Matrix& v0, int steps) {
  const double h = 1.0 / steps;
  Matrix v = v0;
  auto f = [&](double t, const Matrix& w) {
    const auto [pos, vel] = curve(t);
    return rate(pos, vel, w);
  };
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const Matrix k1 = f(t, v);
    const Matrix k2 = f(t + 0.5 * h, v + 0.5 * h * k1);
    const Matrix k3 = f(t + 0.5 * h, v + 0.5 * h * k2);
    const Matrix k4 = f(t + h, v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return v;
}

// Projection rates. Sphere and Grassmann: P = I - Y Y^T. Stiefel:
// P(A) = A - X sym(X^T A).

inline Matrix projection_rate(const Sphere&, const Matrix& pos, const Matrix& vel, const Matrix& v) {
  return -(vel * (pos.transpose() * v) + pos * (vel.transpose() * v));
}

inline Matrix projection_rate(const Grassmann&, const Matrix& pos, const Matrix& vel, const Matrix& v) {
  return -(vel * (pos.transpose() * v) + pos * (vel.transpose() * v));
}

inline Matrix projection_rate(const Stiefel&, const Matrix& pos, const Matrix& vel, const Matrix& v) {
  return -(vel * linalg::sym(pos.transpose() * v) + pos * linalg::sym(vel.transpose() * v));
}

/// Transport of v along an arbitrary curve on M starting at x; the result is
/// tangent at curve(1).
template <class M>
TangentVector ode_transport_along_curve(const M& manifold, const Curve& curve, const TangentVector& v,
                                        const OdeTransportConfig& cfg = {}) {
  cfg.validate();
  auto rate = [&manifold](const Matrix& p, const Matrix& vel, const Matrix& w) {
    return projection_rate(manifold, p, vel, w);
  };
  Matrix out = rk4_transport(curve, rate, v.value, cfg.steps);
  const ManifoldPoint end{curve(1.0).first};
  const double residual = manifold.tangent_residual(end, out);
  if (residual > cfg.tol * std::max(1.0, v.value.norm())) {
    throw IntegrationError("ODE transport left the tangent space (residual " + std::to_string(residual) + ")");
  }
  return {end.value, std::move(out)};
}

/// Transport along the geodesic t -> Exp_x(t u), t in [0, 1].
template <class M>
TangentVector ode_transport_along(const M& manifold, const ManifoldPoint& x, const TangentVector& u,
                                  const TangentVector& v, const OdeTransportConfig& cfg = {}) {
  ManifoldBase<M>::require_base(x, u);
  ManifoldBase<M>::require_base(x, v);
  if (u.value.isZero(0.0)) return v;
  Curve curve = [&](double t) { return manifold.geodesic(x, u, t); };
  return ode_transport_along_curve(manifold, curve, v, cfg);
}

/// Transport along the minimal geodesic from x to y, expressed at y.value.
inline TangentVector ode_parallel_transport(const Sphere& m, const ManifoldPoint& x, const ManifoldPoint& y,
                                            const TangentVector& v, const OdeTransportConfig& cfg = {}) {
  const TangentVector u = m.log_map(x, y);
  TangentVector out = ode_transport_along(m, x, u, v, cfg);
  return {y.value, std::move(out.value)};
}

inline TangentVector ode_parallel_transport(const Grassmann& m, const ManifoldPoint& x, const ManifoldPoint& y,
                                            const TangentVector& v, const OdeTransportConfig& cfg = {}) {
  const TangentVector u = m.log_map(x, y);
  const TangentVector out = ode_transport_along(m, x, u, v, cfg);
  return {y.value, Grassmann::change_representative(out.value, out.base, y.value)};
}

/// Curve t -> Retr_x(t u) with central-difference velocity.
template <class M>
Curve retraction_curve(const M& manifold, const ManifoldPoint& x, const TangentVector& u, RetractionKind kind,
                       double h = 1e-6) {
  return [&manifold, x, u, kind, h](double t) {
    auto at = [&](double s) { return manifold.retract(x, {x.value, s * u.value}, kind).value; };
    Matrix pos = at(t);
    Matrix vel = (at(t + h) - at(t - h)) / (2.0 * h);
    return std::make_pair(std::move(pos), std::move(vel));
  };
}

/// Length of a curve on [0, 1] by composite 3-point Gauss-Legendre.
inline double curve_length(const Curve& curve, int panels = 64) {
  static const double nodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static const double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double h = 1.0 / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double mid = (i + 0.5) * h;
    for (int q = 0; q < 3; ++q) total += weights[q] * 0.5 * h * curve(mid + 0.5 * h * nodes[q]).second.norm();
  }
  return total;
}

/// RK4 integration of the Stiefel geodesic equation X'' = -X (X'^T X'),
/// returning X(t1).
inline Matrix stiefel_geodesic_ode(const Matrix& X0, const Matrix& V0, double t1, int steps) {
  const double h = t1 / steps;
  Matrix X = X0;
  Matrix V = V0;
  auto acc = [](const Matrix& x, const Matrix& v) -> Matrix { return -x * (v.transpose() * v); };
  for (int i = 0; i < steps; ++i) {
    const Matrix a1 = acc(X, V);
    const Matrix x2 = X + 0.5 * h * V, v2 = V + 0.5 * h * a1;
    const Matrix a2 = acc(x2, v2);
    const Matrix x3 = X + 0.5 * h * v2, v3 = V + 0.5 * h * a2;
    const Matrix a3 = acc(x3, v3);
    const Matrix x4 = X + h * v3, v4 = V + h * a3;
    const Matrix a4 = acc(x4, v4);
    X += (h / 6.0) * (V + 2.0 * v2 + 2.0 * v3 + v4);
    V += (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  }
  return X;
}

}  // namespace zorasa::verify
