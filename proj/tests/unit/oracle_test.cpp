#include "support.hpp"

#include <gtest/gtest.h>

using namespace zorasa;

namespace {

StochasticOracle constant_oracle(double c) {
  StochasticOracle o;
  o.eval = [c](const ManifoldPoint&, const NoiseSample&) { return c; };
  o.true_gradient = [](const ManifoldPoint& x) { return TangentVector{x.value, Matrix::Zero(x.value.rows(), x.value.cols())}; };
  return o;
}

// f(x) = <a, x> restricted to the sphere.
StochasticOracle linear_oracle(const Vector& a) {
  const Sphere s(a.size());
  StochasticOracle o;
  o.eval = [a](const ManifoldPoint& x, const NoiseSample&) { return a.dot(x.value.col(0)); };
  o.true_gradient = [a, s](const ManifoldPoint& x) { return s.project_tangent(x, a); };
  return o;
}

}  // namespace

TEST(EstimateGradient, ConstantOracleGivesZero) {
  RandomStream rng(1);
  const Stiefel st(6, 2);
  const auto x = st.random_point(rng);
  for (double mu : {1e-1, 1e-4})
    for (std::int64_t m : {1, 7}) {
      const auto est = estimate_gradient(constant_oracle(3.5), st, x, SmoothingConfig{mu, m}, rng);
      EXPECT_EQ(est.direction.value.norm(), 0.0);
      EXPECT_EQ(est.oracle_calls, 2 * m);
      EXPECT_EQ(est.mu_used, mu);
    }
}

TEST(EstimateGradient, BatchIsAverageOfSingles) {
  RandomStream rng(2);
  const Sphere s(6);
  const auto x = s.random_point(rng);
  Vector a = rng.normal_vector(6);
  const auto oracle = linear_oracle(a);
  RandomStream r1 = RandomStream::derive(3, 0), r2 = r1;
  const Matrix g2 = estimate_gradient(oracle, s, x, SmoothingConfig{1e-3, 2}, r1).direction.value;
  const Matrix ga = estimate_gradient(oracle, s, x, SmoothingConfig{1e-3, 1}, r2).direction.value;
  const Matrix gb = estimate_gradient(oracle, s, x, SmoothingConfig{1e-3, 1}, r2).direction.value;
  EXPECT_LT((g2 - 0.5 * (ga + gb)).norm(), 1e-13 * g2.norm());
}

TEST(EstimateGradient, SharesNoiseBetweenEvaluations) {
  RandomStream rng(4);
  const Sphere s(4);
  const auto x = s.random_point(rng);
  int draws = 0;
  StochasticOracle o;
  o.sampler = [&draws](RandomStream& r) -> NoiseSample {
    ++draws;
    return Vector::Constant(1, r.normal());
  };
  // A pure-noise oracle: identical noise at both points gives zero.
  o.eval = [](const ManifoldPoint&, const NoiseSample& xi) { return 100.0 * xi(0); };
  const auto est = estimate_gradient(o, s, x, SmoothingConfig{1e-3, 5}, rng);
  EXPECT_EQ(draws, 5);
  EXPECT_EQ(est.direction.value.norm(), 0.0);
}

TEST(EstimateGradient, LinearOnSphereBiasWithinBound) {
  RandomStream rng(5);
  const Sphere s(10);
  const double d = 9;
  const auto x = s.random_point(rng);
  Vector a = rng.normal_vector(10);
  // Riemannian Hessian of <a, x> on the unit sphere is -<a, x> I, so L = ||a||.
  const double L = a.norm();
  const double mu = 1e-4;
  const auto e = estimate_moments(linear_oracle(a), s, x, SmoothingConfig{mu, 1}, 100000, rng);
  const double bound = mu * mu * L * L * std::pow(d + 3, 3) / 4.0;
  EXPECT_LE(e.bias_sq, bound + 3.0 * e.bias_sq_noise);
}

TEST(EstimateGradient, BiasShrinksLinearlyInMu) {
  RandomStream pick(6);
  const Sphere s(6);
  const auto x = s.random_point(pick);
  const bench::SphereQuadratic prob = bench::make_sphere_quadratic(6, pick);
  const auto oracle = bench::make_sphere_quadratic_oracle(prob);
  const Matrix grad = oracle.true_gradient(x).value;
  std::vector<double> mus = {1e-2, 1e-3, 1e-4, 1e-5}, bias;
  const int n = 20000;
  for (double mu : mus) {
    // Control variate: subtract <grad, u> u, whose mean is exactly grad.
    RandomStream rng(7);
    Matrix acc = Matrix::Zero(6, 1);
    for (int i = 0; i < n; ++i) {
      RandomStream copy = rng;
      const Matrix G = estimate_gradient(oracle, s, x, SmoothingConfig{mu, 1}, rng).direction.value;
      const Matrix u = s.sample_tangent_gaussian(x, copy).value;
      acc += G - linalg::frobenius_inner(grad, u) * u;
    }
    bias.push_back((acc / n).norm());
  }
  EXPECT_GE(zorasa::testing::loglog_slope(mus, bias), 0.9);
}

TEST(EstimateGradient, ExpAndRetractionAgreeToFirstOrder) {
  RandomStream pick(8);
  const Sphere s(5);
  const auto x = s.random_point(pick);
  const bench::SphereQuadratic prob = bench::make_sphere_quadratic(5, pick);
  const auto oracle = bench::make_sphere_quadratic_oracle(prob);
  for (double mu : {1e-2, 1e-3, 1e-4}) {
    RandomStream r1(9), r2(9);
    const Matrix ge = estimate_gradient(oracle, s, x, SmoothingConfig{mu, 50, MapKind::ExpMap}, r1).direction.value;
    const Matrix gr =
        estimate_gradient(oracle, s, x, SmoothingConfig{mu, 50, MapKind::Retraction, RetractionKind::Polar}, r2)
            .direction.value;
    EXPECT_LT((ge - gr).norm(), 50.0 * mu) << "mu " << mu;
  }
}

TEST(EstimateGradient, NonFiniteValueThrows) {
  RandomStream rng(10);
  const Sphere s(3);
  const auto x = s.random_point(rng);
  StochasticOracle o;
  o.eval = [](const ManifoldPoint&, const NoiseSample&) { return std::nan(""); };
  EXPECT_THROW(estimate_gradient(o, s, x, SmoothingConfig{}, rng), OracleValueError);
}

TEST(EstimateGradient, InvalidConfigThrows) {
  RandomStream rng(11);
  const Sphere s(3);
  const auto x = s.random_point(rng);
  EXPECT_THROW(estimate_gradient(constant_oracle(0), s, x, SmoothingConfig{0.0, 1}, rng), DomainError);
  EXPECT_THROW(estimate_gradient(constant_oracle(0), s, x, SmoothingConfig{1e-3, 0}, rng), DomainError);
}

TEST(EstimateMoments, ConstantOracleIsZero) {
  RandomStream rng(12);
  const Grassmann gr(5, 2);
  const auto x = gr.random_point(rng);
  const auto e = estimate_moments(constant_oracle(1.0), gr, x, SmoothingConfig{1e-3, 1}, 100, rng);
  EXPECT_EQ(e.mean_sq_norm, 0.0);
  EXPECT_EQ(e.mean_sq_error, 0.0);
  EXPECT_EQ(e.fourth_moment, 0.0);
}

TEST(EstimateMoments, SecondMomentOfDirectionalEstimator) {
  // For a linear f and tiny mu, G ~ <g, u> u with E||G||^2 = (d + 2) ||g||^2.
  RandomStream rng(13);
  const Sphere s(8);
  const auto x = s.random_point(rng);
  const Vector a = rng.normal_vector(8);
  const auto e = estimate_moments(linear_oracle(a), s, x, SmoothingConfig{1e-7, 1}, 200000, rng);
  const double g2 = e.grad_norm * e.grad_norm;
  EXPECT_NEAR(e.mean_sq_norm, 9.0 * g2, 4 * e.mean_sq_norm_se);
  EXPECT_NEAR(e.mean_sq_error, 8.0 * g2, 4 * e.mean_sq_error_se);
}

TEST(MuSchedule, Examples) {
  EXPECT_DOUBLE_EQ(mu_schedule(1, 1, 1, 1), 1.0);
  EXPECT_DOUBLE_EQ(mu_schedule(2, 4, 16, 1), 0.03125);
  EXPECT_DOUBLE_EQ(mu_schedule(1e6, 1e3, 1e8, 1), 1e-8);
  EXPECT_THROW(mu_schedule(0, 1, 1, 1), DomainError);
}
