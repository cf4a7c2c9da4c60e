#pragma once

#include "zorasa/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace zorasa {

/// Principal angles between two subspaces, ascending, each in [0, pi/2].
struct PrincipalAngles {
  Vector theta;
  double frobenius() const { return theta.norm(); }
};

/// Thin SVD of a horizontal tangent G = U diag(sigma) V^T.
struct GrassmannTangentSvd {
  Matrix U;
  Vector sigma;
  Matrix V;
};

/// Grassmann manifold Gr(n, p) of p-dimensional subspaces of R^n.
///
/// A class [X] is stored through an orthonormal representative X and a
/// tangent vector through its horizontal lift G (X^T G = 0). Geodesics
/// returned by exp_map use the representative X V cos(S) V^T + U sin(S) V^T,
/// which is the one aligned with X (X^T Y symmetric positive semidefinite);
/// the closed-form parallel transport is expressed at that representative.
class Grassmann : public ManifoldBase<Grassmann> {
 public:
  Grassmann(Index n, Index p) : n_(n), p_(p) {
    if (p < 1 || n <= p) throw DomainError("Grassmann: need n > p >= 1");
  }

  ManifoldDescriptor descriptor() const {
    return {n_, p_, dimension(ManifoldKind::Grassmann, n_, p_), ManifoldKind::Grassmann};
  }
  Index rows() const { return n_; }
  Index cols() const { return p_; }

  bool supports(RetractionKind kind) const {
    return kind == RetractionKind::QR || kind == RetractionKind::Polar ||
           kind == RetractionKind::Projection || kind == RetractionKind::Exponential;
  }
  RetractionKind default_retraction() const { return RetractionKind::Projection; }
  bool has_closed_form_transport() const { return true; }

  double feasibility_residual(const ManifoldPoint& x) const {
    check_shape(x.value, "Grassmann point");
    return linalg::orthonormality_residual(x.value);
  }

  /// Horizontal projection (I - X X^T) A.
  TangentVector project_tangent(const ManifoldPoint& x, const Matrix& A) const {
    check_shape(A, "Grassmann::project_tangent");
    return {x.value, A - x.value * (x.value.transpose() * A)};
  }

  /// QR returns the positive-diagonal Q factor of X + G. Polar and Projection
  /// return the polar factor, which spans the same subspace and is aligned
  /// with X, so the projected transport lands at a consistent representative.
  ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& u, RetractionKind kind) const {
    require_base(x, u);
    if (u.value.isZero(0.0)) return x;
    switch (kind) {
      case RetractionKind::QR: return {linalg::qr_positive(x.value + u.value).Q};
      case RetractionKind::Polar:
      case RetractionKind::Projection:
        return {linalg::qr_positive(linalg::polar_factor(x.value + u.value)).Q};
      case RetractionKind::Exponential: return exp_map(x, u);
      default: unsupported_retraction(kind);
    }
  }

  GrassmannTangentSvd tangent_svd(const Matrix& G) const {
    auto svd = linalg::thin_svd(G);
    return {std::move(svd.U), std::move(svd.s), std::move(svd.V)};
  }

  std::pair<Matrix, Matrix> geodesic(const ManifoldPoint& x, const TangentVector& u, double t) const {
    require_horizontal(x.value, u.value);
    const auto svd = tangent_svd(u.value);
    const Vector ts = t * svd.sigma;
    const Matrix XV = x.value * svd.V;
    Matrix pos = (XV * ts.array().cos().matrix().asDiagonal() +
                  svd.U * ts.array().sin().matrix().asDiagonal()) *
                 svd.V.transpose();
    Matrix vel = (XV * (-ts.array().sin() * svd.sigma.array()).matrix().asDiagonal() +
                  svd.U * (ts.array().cos() * svd.sigma.array()).matrix().asDiagonal()) *
                 svd.V.transpose();
    return {std::move(pos), std::move(vel)};
  }

  ManifoldPoint exp_map(const ManifoldPoint& x, const TangentVector& u) const {
    require_base(x, u);
    if (u.value.isZero(0.0)) return x;
    return {linalg::qr_positive(geodesic(x, u, 1.0).first).Q};
  }

  /// Horizontal G with Exp_[X](G) = [Y]; needs every principal angle < pi/2.
  TangentVector log_map(const ManifoldPoint& x, const ManifoldPoint& y) const {
    const Matrix& X = x.value;
    const Matrix& Y = y.value;
    const Matrix C = X.transpose() * Y;
    const auto csvd = linalg::thin_svd(C);
    if (csvd.s(csvd.s.size() - 1) < 1e-12) {
      throw LogUndefined("Grassmann log: a principal angle reaches pi/2");
    }
    const Matrix M = (Y - X * C) * C.inverse();
    const auto svd = linalg::thin_svd(M);
    Matrix G = svd.U * svd.s.array().atan().matrix().asDiagonal() * svd.V.transpose();
    return {X, G - X * (X.transpose() * G)};
  }

  PrincipalAngles principal_angles(const ManifoldPoint& x, const ManifoldPoint& y) const {
    return principal_angles(x.value, y.value);
  }

  /// Angles from arccos of the singular values of X^T Y, switching to arcsin of
  /// the singular values of (I - X X^T) Y for small angles where arccos loses
  /// precision. Singular values are clamped into [0, 1].
  static PrincipalAngles principal_angles(const Matrix& X, const Matrix& Y) {
    const Vector cosines = linalg::thin_svd(X.transpose() * Y).s;      // descending
    const Vector sines = linalg::thin_svd(Y - X * (X.transpose() * Y)).s;  // descending
    const Index p = cosines.size();
    Vector theta(p);
    for (Index i = 0; i < p; ++i) {
      const double c = std::clamp(cosines(i), 0.0, 1.0);
      const double s = std::clamp(sines(p - 1 - i), 0.0, 1.0);
      theta(i) = (c * c >= 0.5) ? std::asin(s) : std::acos(c);
    }
    std::sort(theta.begin(), theta.end());
    return {theta};
  }

  double distance(const ManifoldPoint& x, const ManifoldPoint& y) const {
    return principal_angles(x, y).frobenius();
  }

  /// -X V sin(S) U^T xi + U cos(S) U^T xi + (I - U U^T) xi, the transport of
  /// xi along the geodesic with initial velocity G = U S V^T.
  TangentVector transport_along(const ManifoldPoint& x, const TangentVector& u,
                                const TangentVector& v) const {
    require_base(x, u);
    require_base(x, v);
    require_horizontal(x.value, u.value);
    require_horizontal(x.value, v.value);
    if (u.value.isZero(0.0)) return v;
    const auto svd = tangent_svd(u.value);
    const Matrix Ut_xi = svd.U.transpose() * v.value;
    Matrix out = -x.value * svd.V * svd.sigma.array().sin().matrix().asDiagonal() * Ut_xi +
                 svd.U * svd.sigma.array().cos().matrix().asDiagonal() * Ut_xi +
                 (v.value - svd.U * Ut_xi);
    return {exp_map(x, u).value, std::move(out)};
  }

  /// Transport along the minimal geodesic from [X] to [Y], expressed as the
  /// horizontal lift at the representative y.value.
  TangentVector parallel_transport(const ManifoldPoint& x, const ManifoldPoint& y,
                                   const TangentVector& v) const {
    const TangentVector u = log_map(x, y);
    const TangentVector moved = transport_along(x, u, v);
    return {y.value, change_representative(moved.value, moved.base, y.value)};
  }

  /// Re-expresses a horizontal lift at representative `from` as the lift at
  /// `to`, where both span the same subspace (to = from * O).
  static Matrix change_representative(const Matrix& lift, const Matrix& from, const Matrix& to) {
    const Matrix O = from.transpose() * to;
    return lift * O;
  }

  /// The representative of [Y] aligned with X: Y O with X^T Y O symmetric PSD.
  static Matrix aligned_representative(const Matrix& X, const Matrix& Y) {
    const auto svd = linalg::thin_svd(Y.transpose() * X);
    return Y * (svd.U * svd.V.transpose());
  }

  ManifoldPoint random_point(RandomStream& rng) const {
    return {linalg::qr_positive(rng.normal_matrix(n_, p_)).Q};
  }

  void require_horizontal(const Matrix& X, const Matrix& G) const {
    if ((X.transpose() * G).norm() > kFeasibilityTol * std::max(1.0, G.norm())) {
      throw NotHorizontal("Grassmann: tangent matrix is not horizontal (X^T G != 0)");
    }
  }

 private:
  Index n_;
  Index p_;
};

}  // namespace zorasa
