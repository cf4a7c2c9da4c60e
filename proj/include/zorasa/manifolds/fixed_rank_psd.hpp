#pragma once

#include "zorasa/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace zorasa {

/// Rank-r PSD matrices W = G G^T as the quotient R_*^{n x r} / O(r).
///
/// Points are full-rank factors G, tangent vectors are horizontal lifts
/// (G^T H symmetric) and the metric is the Euclidean one of the total space.
/// With this flat geometry horizontal straight lines are geodesics, so the
/// retraction G + H is also the exponential map for as long as the rank holds.
/// Parallel transport is not provided.
class FixedRankPsd : public ManifoldBase<FixedRankPsd> {
 public:
  FixedRankPsd(Index n, Index r) : n_(n), r_(r) {
    if (r < 1 || n < r) throw DomainError("FixedRankPsd: need n >= r >= 1");
  }

  ManifoldDescriptor descriptor() const {
    return {n_, r_, dimension(ManifoldKind::FixedRankPSD, n_, r_), ManifoldKind::FixedRankPSD};
  }
  Index rows() const { return n_; }
  Index cols() const { return r_; }

  bool supports(RetractionKind kind) const {
    return kind == RetractionKind::EuclideanHorizontal || kind == RetractionKind::Projection ||
           kind == RetractionKind::Exponential;
  }
  RetractionKind default_retraction() const { return RetractionKind::EuclideanHorizontal; }
  bool has_closed_form_transport() const { return false; }

  /// 0 for a full-column-rank factor, +inf otherwise.
  double feasibility_residual(const ManifoldPoint& x) const {
    check_shape(x.value, "FixedRankPsd point");
    return full_rank(x.value) ? 0.0 : std::numeric_limits<double>::infinity();
  }

  /// A - G Omega with Omega skew solving Omega (G^T G) + (G^T G) Omega = G^T A - A^T G.
  TangentVector project_tangent(const ManifoldPoint& x, const Matrix& A) const {
    check_shape(A, "FixedRankPsd::project_tangent");
    const Matrix& G = x.value;
    const Matrix GtA = G.transpose() * A;
    const Matrix Omega = linalg::solve_symmetric_sylvester(G.transpose() * G, GtA - GtA.transpose());
    return {G, A - G * Omega};
  }

  /// Skew-symmetric Sylvester solution used by project_tangent; exposed for
  /// residual checks.
  Matrix vertical_component(const ManifoldPoint& x, const Matrix& A) const {
    const Matrix& G = x.value;
    const Matrix GtA = G.transpose() * A;
    return linalg::solve_symmetric_sylvester(G.transpose() * G, GtA - GtA.transpose());
  }

  ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& u, RetractionKind kind) const {
    require_base(x, u);
    if (!supports(kind)) unsupported_retraction(kind);
    if (u.value.isZero(0.0)) return x;
    Matrix Y = x.value + u.value;
    if (!full_rank(Y)) {
      throw NumericalRankError("FixedRankPsd retraction: G + H lost rank");
    }
    return {std::move(Y)};
  }

  ManifoldPoint exp_map(const ManifoldPoint& x, const TangentVector& u) const {
    return retract(x, u, RetractionKind::Exponential);
  }

  /// Y O - G with O the Procrustes rotation aligning Y to G.
  TangentVector log_map(const ManifoldPoint& x, const ManifoldPoint& y) const {
    const auto svd = linalg::thin_svd(y.value.transpose() * x.value);
    if (svd.s(svd.s.size() - 1) <= 1e-12 * std::max(1.0, svd.s(0))) {
      throw LogUndefined("FixedRankPsd log: Procrustes alignment is not unique");
    }
    const Matrix O = svd.U * svd.V.transpose();
    return {x.value, y.value * O - x.value};
  }

  /// min over orthogonal O of ||G - Y O||_F.
  double distance(const ManifoldPoint& x, const ManifoldPoint& y) const {
    const double nuclear = linalg::thin_svd(x.value.transpose() * y.value).s.sum();
    return std::sqrt(std::max(0.0, x.value.squaredNorm() + y.value.squaredNorm() - 2.0 * nuclear));
  }

  TangentVector parallel_transport(const ManifoldPoint&, const ManifoldPoint&,
                                   const TangentVector&) const {
    throw UnsupportedOperation("FixedRankPsd: parallel transport is not available");
  }

  ManifoldPoint random_point(RandomStream& rng) const { return {rng.normal_matrix(n_, r_)}; }

  /// W = G G^T
  static Matrix gram(const ManifoldPoint& x) { return x.value * x.value.transpose(); }

 private:
  static bool full_rank(const Matrix& G) {
    const Vector s = linalg::thin_svd(G).s;
    return s.size() > 0 && s(s.size() - 1) > 1e-10 * std::max(1.0, s(0));
  }

  Index n_;
  Index r_;
};

}  // namespace zorasa
