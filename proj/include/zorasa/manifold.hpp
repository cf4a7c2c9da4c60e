#pragma once

#include "zorasa/core/linalg.hpp"
#include "zorasa/core/random.hpp"
#include "zorasa/core/types.hpp"

#include <cmath>
#include <concepts>
#include <string>

namespace zorasa {

/// Operations every manifold implementation provides. Tangent vectors are
/// ambient matrices (horizontal lifts for the quotient manifolds) and the
/// metric is the Frobenius inner product in all cases.
template <class M>
concept Manifold = requires(const M& m, const ManifoldPoint& x, const TangentVector& u,
                            const Matrix& A, RetractionKind kind, RandomStream& rng) {
  { m.descriptor() } -> std::convertible_to<ManifoldDescriptor>;
  { m.project_tangent(x, A) } -> std::same_as<TangentVector>;
  { m.retract(x, u, kind) } -> std::same_as<ManifoldPoint>;
  { m.exp_map(x, u) } -> std::same_as<ManifoldPoint>;
  { m.log_map(x, x) } -> std::same_as<TangentVector>;
  { m.parallel_transport(x, x, u) } -> std::same_as<TangentVector>;
  { m.distance(x, x) } -> std::convertible_to<double>;
  { m.inner(x, u, u) } -> std::convertible_to<double>;
  { m.norm(x, u) } -> std::convertible_to<double>;
  { m.vector_transport(x, u, u, kind) } -> std::same_as<TangentVector>;
  { m.sample_tangent_gaussian(x, rng) } -> std::same_as<TangentVector>;
  { m.random_point(rng) } -> std::same_as<ManifoldPoint>;
  { m.feasibility_residual(x) } -> std::convertible_to<double>;
  { m.supports(kind) } -> std::convertible_to<bool>;
  { m.default_retraction() } -> std::convertible_to<RetractionKind>;
};

/// Manifolds whose parallel transport along the geodesic t -> Exp_x(t u) has a
/// closed form.
template <class M>
concept ParallelTransportManifold = Manifold<M> && requires(const M& m, const ManifoldPoint& x,
                                                            const TangentVector& u) {
  { m.transport_along(x, u, u) } -> std::same_as<TangentVector>;
  { m.has_closed_form_transport() } -> std::convertible_to<bool>;
};

/// Shared implementation of the metric, projection-based vector transport and
/// tangent Gaussian sampling. `Derived` supplies the geometry.
template <class Derived>
class ManifoldBase {
 public:
  double inner(const ManifoldPoint& x, const TangentVector& u, const TangentVector& v) const {
    require_base(x, u);
    require_base(x, v);
    return linalg::frobenius_inner(u.value, v.value);
  }

  double norm(const ManifoldPoint& x, const TangentVector& u) const {
    return std::sqrt(inner(x, u, u));
  }

  /// Projection vector transport: the image of `v` in the tangent space at
  /// Retr_x(u).
  TangentVector vector_transport(const ManifoldPoint& x, const TangentVector& u,
                                 const TangentVector& v, RetractionKind kind) const {
    require_base(x, u);
    require_base(x, v);
    const ManifoldPoint y = self().retract(x, u, kind);
    return self().project_tangent(y, v.value);
  }

  /// Standard Gaussian on T_x M, drawn by projecting an i.i.d. ambient
  /// Gaussian.
  TangentVector sample_tangent_gaussian(const ManifoldPoint& x, RandomStream& rng) const {
    const auto d = self().descriptor();
    return self().project_tangent(x, rng.normal_matrix(d.ambient_rows, d.ambient_cols));
  }

  TangentVector zero_vector(const ManifoldPoint& x) const {
    return {x.value, Matrix::Zero(x.value.rows(), x.value.cols())};
  }

  /// Wraps an ambient matrix already known to be tangent at x.
  TangentVector make_tangent(const ManifoldPoint& x, Matrix value) const {
    check_shape(value, "make_tangent");
    return {x.value, std::move(value)};
  }

  /// ||A - proj_x(A)||_F
  double tangent_residual(const ManifoldPoint& x, const Matrix& A) const {
    return (A - self().project_tangent(x, A).value).norm();
  }

  bool is_on_manifold(const ManifoldPoint& x, double tol = kFeasibilityTol) const {
    return self().feasibility_residual(x) <= tol;
  }

  TangentVector scaled(const TangentVector& u, double alpha) const {
    return {u.base, alpha * u.value};
  }

  void check_shape(const Matrix& A, const char* what) const {
    const auto d = self().descriptor();
    require_shape(A, d.ambient_rows, d.ambient_cols, what);
  }

  static void require_base(const ManifoldPoint& x, const TangentVector& u) {
    if (u.base.rows() != x.value.rows() || u.base.cols() != x.value.cols() ||
        !(u.base.array() == x.value.array()).all()) {
      throw BasePointMismatch("tangent vector is not attached to the given base point");
    }
  }

 protected:
  const Derived& self() const { return static_cast<const Derived&>(*this); }

  [[noreturn]] void unsupported_retraction(RetractionKind kind) const {
    throw UnsupportedRetraction(std::string("retraction '") + to_string(kind) +
                                "' is not supported on " + to_string(self().descriptor().kind));
  }
};

}  // namespace zorasa
