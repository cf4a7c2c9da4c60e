#pragma once

#include "zorasa/manifold.hpp"
#include "zorasa/manifolds/sphere.hpp"

#include <utility>

namespace zorasa {

/// Stiefel manifold St(n, p) = {X in R^{n x p} : X^T X = I} with the embedded
/// Euclidean metric. St(n, 1) is the sphere and St(p, p) the orthogonal group.
///
/// Retractions: QR (positive-diagonal Q factor of X + xi), Polar/Projection
/// (U V^T from the thin SVD of X + xi) and Exponential. Every returned point is
/// re-orthonormalized so long runs do not drift off the manifold.
///
/// There is no closed-form parallel transport, logarithm or distance for
/// p > 1; those throw UnsupportedOperation. For p = 1 the sphere formulas are
/// used.
class Stiefel : public ManifoldBase<Stiefel> {
 public:
  Stiefel(Index n, Index p) : n_(n), p_(p) {
    if (p < 1 || n < p) throw DomainError("Stiefel: need n >= p >= 1");
  }

  ManifoldDescriptor descriptor() const {
    return {n_, p_, dimension(ManifoldKind::Stiefel, n_, p_), ManifoldKind::Stiefel};
  }
  Index rows() const { return n_; }
  Index cols() const { return p_; }

  bool supports(RetractionKind kind) const {
    return kind == RetractionKind::QR || kind == RetractionKind::Polar ||
           kind == RetractionKind::Projection || kind == RetractionKind::Exponential;
  }
  RetractionKind default_retraction() const { return RetractionKind::Polar; }
  bool has_closed_form_transport() const { return p_ == 1; }

  double feasibility_residual(const ManifoldPoint& x) const {
    check_shape(x.value, "Stiefel point");
    return linalg::orthonormality_residual(x.value);
  }

  /// (I - X X^T) A + X skew(X^T A), written as A - X sym(X^T A).
  TangentVector project_tangent(const ManifoldPoint& x, const Matrix& A) const {
    check_shape(A, "Stiefel::project_tangent");
    return {x.value, A - x.value * linalg::sym(x.value.transpose() * A)};
  }

  ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& u, RetractionKind kind) const {
    require_base(x, u);
    if (u.value.isZero(0.0)) return x;
    switch (kind) {
      case RetractionKind::QR: return {linalg::qr_positive(x.value + u.value).Q};
      case RetractionKind::Polar:
      case RetractionKind::Projection:
        return {reorthonormalize(linalg::polar_factor(x.value + u.value))};
      case RetractionKind::Exponential: return exp_map(x, u);
      default: unsupported_retraction(kind);
    }
  }

  /// Geodesic X(t) = [X U] exp(t [A -S; I A]) [I; 0] exp(-A t) with
  /// A = X^T U and S = U^T U, and its velocity.
  std::pair<Matrix, Matrix> geodesic(const ManifoldPoint& x, const TangentVector& u, double t) const {
    const Matrix& X = x.value;
    const Matrix& U = u.value;
    const Matrix A = X.transpose() * U;
    const Matrix S = U.transpose() * U;
    Matrix M(2 * p_, 2 * p_);
    M << A, -S, Matrix::Identity(p_, p_), A;
    Matrix XU(n_, 2 * p_);
    XU << X, U;
    const Matrix E = linalg::expm(t * M);
    const Matrix F = linalg::expm(-t * A);
    const Matrix B = XU * E.leftCols(p_);
    Matrix pos = B * F;
    Matrix vel = XU * (M * E).leftCols(p_) * F - pos * A;
    return {std::move(pos), std::move(vel)};
  }

  ManifoldPoint exp_map(const ManifoldPoint& x, const TangentVector& u) const {
    require_base(x, u);
    if (u.value.isZero(0.0)) return x;
    return {reorthonormalize(geodesic(x, u, 1.0).first)};
  }

  TangentVector log_map(const ManifoldPoint& x, const ManifoldPoint& y) const {
    if (p_ != 1) throw UnsupportedOperation("Stiefel log has no closed form for p > 1");
    return {x.value, sphere_formulas::log(x.value, y.value)};
  }

  double distance(const ManifoldPoint& x, const ManifoldPoint& y) const {
    if (p_ != 1) throw UnsupportedOperation("Stiefel distance has no closed form for p > 1");
    return sphere_formulas::distance(x.value, y.value);
  }

  TangentVector parallel_transport(const ManifoldPoint& x, const ManifoldPoint& y,
                                   const TangentVector& v) const {
    if (p_ != 1) throw UnsupportedOperation("Stiefel parallel transport has no closed form for p > 1");
    require_base(x, v);
    const Matrix u = sphere_formulas::log(x.value, y.value);
    return {y.value, sphere_formulas::project(y.value, sphere_formulas::transport(x.value, u, v.value))};
  }

  TangentVector transport_along(const ManifoldPoint& x, const TangentVector& u,
                                const TangentVector& v) const {
    if (p_ != 1) throw UnsupportedOperation("Stiefel parallel transport has no closed form for p > 1");
    require_base(x, u);
    require_base(x, v);
    return {exp_map(x, u).value, sphere_formulas::transport(x.value, u.value, v.value)};
  }

  ManifoldPoint random_point(RandomStream& rng) const {
    return {linalg::qr_positive(rng.normal_matrix(n_, p_)).Q};
  }

 private:
  static Matrix reorthonormalize(const Matrix& X) { return linalg::qr_positive(X).Q; }

  Index n_;
  Index p_;
};

}  // namespace zorasa
