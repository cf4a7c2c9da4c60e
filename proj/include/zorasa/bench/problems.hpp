#pragma once

#include "zorasa/manifolds/fixed_rank_psd.hpp"
#include "zorasa/manifolds/grassmann.hpp"
#include "zorasa/manifolds/sphere.hpp"
#include "zorasa/manifolds/stiefel.hpp"
#include "zorasa/oracle.hpp"

#include <Eigen/Eigenvalues>

namespace zorasa::bench {

/// min over St(n, r) of -1/2 tr(X^T Sigma X) with z ~ N(0, Sigma).
struct KpcaProblem {
  Index n = 0;
  Index r = 0;
  Matrix Sigma;
  Matrix V;        // orthogonal, columns are eigenvectors
  Vector lambda;   // eigenvalues, top r first
  Matrix sqrt_cov; // V diag(sqrt(lambda))
  double f_star = 0.0;

  Matrix top_subspace() const { return V.leftCols(r); }
  double lambda_max() const { return lambda.maxCoeff(); }
};

/// Top r eigenvalues uniform in [100, 200], the rest uniform in [1, 50], V the
/// positive-diagonal Q factor of a Gaussian matrix.
inline KpcaProblem make_kpca_problem(Index n, Index r, RandomStream& rng) {
  if (r < 1 || n < r) throw DomainError("k-PCA: need n >= r >= 1");
  KpcaProblem p;
  p.n = n;
  p.r = r;
  p.V = linalg::qr_positive(rng.normal_matrix(n, n)).Q;
  p.lambda.resize(n);
  for (Index i = 0; i < n; ++i) p.lambda(i) = i < r ? rng.uniform(100.0, 200.0) : rng.uniform(1.0, 50.0);
  p.Sigma = p.V * p.lambda.asDiagonal() * p.V.transpose();
  p.Sigma = linalg::sym(p.Sigma);
  p.sqrt_cov = p.V * p.lambda.cwiseSqrt().asDiagonal();
  p.f_star = -0.5 * p.lambda.head(r).sum();
  return p;
}

inline double kpca_objective(const KpcaProblem& p, const Matrix& X) {
  return -0.5 * (X.transpose() * p.Sigma * X).trace();
}

/// Principal angles between span(X) and the optimal subspace, as ||Theta||_F.
inline double kpca_subspace_error(const KpcaProblem& p, const Matrix& X) {
  return Grassmann::principal_angles(X, p.top_subspace()).frobenius();
}

inline StochasticOracle make_kpca_oracle(const KpcaProblem& p) {
  const Stiefel st(p.n, p.r);
  StochasticOracle o;
  o.sampler = [&p](RandomStream& rng) -> NoiseSample { return p.sqrt_cov * rng.normal_vector(p.n); };
  o.eval = [](const ManifoldPoint& x, const NoiseSample& z) { return -0.5 * (x.value.transpose() * z).squaredNorm(); };
  o.objective = [&p](const ManifoldPoint& x) { return kpca_objective(p, x.value); };
  o.true_gradient = [&p, st](const ManifoldPoint& x) { return st.project_tangent(x, -p.Sigma * x.value); };
  o.optimal_value = p.f_star;
  o.smoothness = p.lambda_max();
  return o;
}

/// min over S^{n-1} of f(x) = -1/2 x^T Sigma x with exact (noiseless)
/// evaluations. Eigenvalues uniform in [1, 10].
struct SphereQuadratic {
  Index n = 0;
  Matrix Sigma;
  Vector lambda;
};

inline SphereQuadratic make_sphere_quadratic(Index n, RandomStream& rng) {
  SphereQuadratic p;
  p.n = n;
  const Matrix V = linalg::qr_positive(rng.normal_matrix(n, n)).Q;
  p.lambda.resize(n);
  for (Index i = 0; i < n; ++i) p.lambda(i) = rng.uniform(1.0, 10.0);
  p.Sigma = linalg::sym(V * p.lambda.asDiagonal() * V.transpose());
  return p;
}

inline double sphere_quadratic_objective(const SphereQuadratic& p, const Matrix& x) {
  return -0.5 * (x.transpose() * p.Sigma * x)(0, 0);
}

inline StochasticOracle make_sphere_quadratic_oracle(const SphereQuadratic& p) {
  const Sphere sphere(p.n);
  StochasticOracle o;
  o.sampler = [](RandomStream&) -> NoiseSample { return {}; };
  o.eval = [&p](const ManifoldPoint& x, const NoiseSample&) { return sphere_quadratic_objective(p, x.value); };
  o.objective = [&p](const ManifoldPoint& x) { return sphere_quadratic_objective(p, x.value); };
  o.true_gradient = [&p, sphere](const ManifoldPoint& x) { return sphere.project_tangent(x, -p.Sigma * x.value); };
  o.optimal_value = -0.5 * p.lambda.maxCoeff();
  o.smoothness = p.lambda.maxCoeff();
  o.noise_level = 0.0;
  return o;
}

/// f(G) = 1/2 E (x^T G G^T x - x^T W* x)^2 with x ~ N(0, I), W* = G* G*^T.
struct FixedRankPsdProblem {
  Index n = 0;
  Index r = 0;
  Matrix G_star;
  Matrix W_star;

  double lambda_max() const { return Eigen::SelfAdjointEigenSolver<Matrix>(W_star).eigenvalues().maxCoeff(); }
};

inline FixedRankPsdProblem make_psd_problem(Index n, Index r, RandomStream& rng) {
  if (r < 1 || n < r) throw DomainError("fixed-rank PSD: need n >= r >= 1");
  FixedRankPsdProblem p;
  p.n = n;
  p.r = r;
  p.G_star = rng.normal_matrix(n, r);
  p.W_star = p.G_star * p.G_star.transpose();
  return p;
}

/// For symmetric D and x ~ N(0, I): E (x^T D x)^2 = 2 ||D||_F^2 + (tr D)^2,
/// so with D = G G^T - W*, f = ||D||_F^2 + (tr D)^2 / 2.
inline double psd_objective(const FixedRankPsdProblem& p, const Matrix& G) {
  const Matrix D = G * G.transpose() - p.W_star;
  const double tr = D.trace();
  return D.squaredNorm() + 0.5 * tr * tr;
}

/// Euclidean gradient 4 D G + 2 tr(D) G. G^T D G and G^T G are symmetric, so
/// it is already horizontal.
inline Matrix psd_euclidean_gradient(const FixedRankPsdProblem& p, const Matrix& G) {
  const Matrix D = G * G.transpose() - p.W_star;
  return 4.0 * D * G + 2.0 * D.trace() * G;
}

inline double psd_error(const FixedRankPsdProblem& p, const Matrix& G) {
  return (G * G.transpose() - p.W_star).norm();
}

/// Curvature scale used for mu: 8 lambda_max(W*) + 4 tr(W*), the Hessian
/// norm bound of f at G = G*.
inline double psd_smoothness_estimate(const FixedRankPsdProblem& p) {
  return 8.0 * p.lambda_max() + 4.0 * p.W_star.trace();
}

inline StochasticOracle make_psd_oracle(const FixedRankPsdProblem& p) {
  const FixedRankPsd m(p.n, p.r);
  StochasticOracle o;
  o.sampler = [&p](RandomStream& rng) -> NoiseSample { return rng.normal_vector(p.n); };
  o.eval = [&p](const ManifoldPoint& G, const NoiseSample& x) {
    const double e = (G.value.transpose() * x).squaredNorm() - (p.G_star.transpose() * x).squaredNorm();
    return 0.5 * e * e;
  };
  o.objective = [&p](const ManifoldPoint& G) { return psd_objective(p, G.value); };
  o.true_gradient = [&p, m](const ManifoldPoint& G) { return m.project_tangent(G, psd_euclidean_gradient(p, G.value)); };
  o.optimal_value = 0.0;
  o.smoothness = psd_smoothness_estimate(p);
  return o;
}

}  // namespace zorasa::bench
