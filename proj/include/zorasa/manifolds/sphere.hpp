#pragma once

#include "zorasa/manifold.hpp"

#include <cmath>
#include <utility>

namespace zorasa {

// Unit-sphere closed forms on n x 1 matrices. Shared with Stiefel(n, 1).
namespace sphere_formulas {

inline double sinc(double t) { return std::abs(t) < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t; }

inline Matrix normalize(const Matrix& v) {
  const double nv = v.norm();
  if (!(nv > 1e-300)) throw NumericalRankError("sphere: cannot normalize a zero vector");
  return v / nv;
}

inline Matrix project(const Matrix& x, const Matrix& A) { return A - x * (x.transpose() * A); }

/// Position and velocity of t -> Exp_x(t u).
inline std::pair<Matrix, Matrix> geodesic(const Matrix& x, const Matrix& u, double t) {
  const double theta = u.norm();
  const double c = std::cos(t * theta);
  const double s = std::sin(t * theta);
  Matrix pos = x * c + u * (t * sinc(t * theta));
  Matrix vel = -x * (theta * s) + u * c;
  return {std::move(pos), std::move(vel)};
}

inline Matrix exp(const Matrix& x, const Matrix& u) { return normalize(geodesic(x, u, 1.0).first); }

inline Matrix log(const Matrix& x, const Matrix& y) {
  const double c = (x.transpose() * y)(0, 0);
  if (c <= -1.0 + 1e-12) throw LogUndefined("sphere log: points are (nearly) antipodal");
  const Matrix w = y - c * x;
  const double s = w.norm();
  if (s == 0.0) return Matrix::Zero(x.rows(), 1);
  return w * (std::atan2(s, c) / s);
}

/// Geodesic distance; the chord form stays accurate for nearby points.
inline double distance(const Matrix& x, const Matrix& y) {
  return 2.0 * std::asin(std::min(1.0, 0.5 * (x - y).norm()));
}

/// Parallel transport of v along the geodesic t -> Exp_x(t u), t in [0, 1].
inline Matrix transport(const Matrix& x, const Matrix& u, const Matrix& v) {
  const double theta = u.norm();
  if (theta == 0.0) return v;
  const Matrix e = u / theta;
  const double ev = (e.transpose() * v)(0, 0);
  return v + (e * (std::cos(theta) - 1.0) - x * std::sin(theta)) * ev;
}

}  // namespace sphere_formulas

/// Unit sphere S^{n-1} in R^n, stored as n x 1 matrices.
class Sphere : public ManifoldBase<Sphere> {
 public:
  explicit Sphere(Index n) : n_(n) {
    if (n < 2) throw DomainError("Sphere: ambient dimension must be >= 2");
  }

  ManifoldDescriptor descriptor() const {
    return {n_, 1, dimension(ManifoldKind::Sphere, n_, 1), ManifoldKind::Sphere};
  }
  Index ambient_dim() const { return n_; }

  bool supports(RetractionKind kind) const {
    return kind == RetractionKind::QR || kind == RetractionKind::Polar ||
           kind == RetractionKind::Projection || kind == RetractionKind::Exponential;
  }
  RetractionKind default_retraction() const { return RetractionKind::Projection; }
  bool has_closed_form_transport() const { return true; }

  double feasibility_residual(const ManifoldPoint& x) const {
    check_shape(x.value, "Sphere point");
    return std::abs(x.value.squaredNorm() - 1.0);
  }

  TangentVector project_tangent(const ManifoldPoint& x, const Matrix& A) const {
    check_shape(A, "Sphere::project_tangent");
    return {x.value, sphere_formulas::project(x.value, A)};
  }

  /// QR, polar and projection retractions coincide here: (x+u)/||x+u||.
  ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& u, RetractionKind kind) const {
    require_base(x, u);
    if (u.value.isZero(0.0)) return x;
    switch (kind) {
      case RetractionKind::QR:
      case RetractionKind::Polar:
      case RetractionKind::Projection: return {sphere_formulas::normalize(x.value + u.value)};
      case RetractionKind::Exponential: return exp_map(x, u);
      default: unsupported_retraction(kind);
    }
  }

  ManifoldPoint exp_map(const ManifoldPoint& x, const TangentVector& u) const {
    require_base(x, u);
    if (u.value.isZero(0.0)) return x;
    return {sphere_formulas::exp(x.value, u.value)};
  }

  std::pair<Matrix, Matrix> geodesic(const ManifoldPoint& x, const TangentVector& u, double t) const {
    return sphere_formulas::geodesic(x.value, u.value, t);
  }

  TangentVector log_map(const ManifoldPoint& x, const ManifoldPoint& y) const {
    return {x.value, sphere_formulas::log(x.value, y.value)};
  }

  double distance(const ManifoldPoint& x, const ManifoldPoint& y) const {
    return sphere_formulas::distance(x.value, y.value);
  }

  TangentVector transport_along(const ManifoldPoint& x, const TangentVector& u,
                                const TangentVector& v) const {
    require_base(x, u);
    require_base(x, v);
    return {exp_map(x, u).value, sphere_formulas::transport(x.value, u.value, v.value)};
  }

  /// Transport along the minimal geodesic from x to y.
  TangentVector parallel_transport(const ManifoldPoint& x, const ManifoldPoint& y,
                                   const TangentVector& v) const {
    require_base(x, v);
    const Matrix u = sphere_formulas::log(x.value, y.value);
    return {y.value, sphere_formulas::project(y.value, sphere_formulas::transport(x.value, u, v.value))};
  }

  ManifoldPoint random_point(RandomStream& rng) const {
    return {sphere_formulas::normalize(rng.normal_matrix(n_, 1))};
  }

 private:
  Index n_;
};

}  // namespace zorasa
