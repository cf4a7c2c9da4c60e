#include "support.hpp"

#include <gtest/gtest.h>

using namespace zorasa;
using zorasa::testing::rk4_second_order;
using zorasa::testing::tangent_with_norm;

namespace {

// Great circle acceleration x'' = -|x'|^2 x.
Matrix sphere_accel(const Matrix& p, const Matrix& v) { return -v.squaredNorm() * p; }

}  // namespace

TEST(Sphere, ProjectionIsOrthogonalAndIdempotent) {
  RandomStream rng(1);
  const Sphere s(6);
  const auto x = s.random_point(rng);
  const Matrix A = rng.normal_matrix(6, 1);
  const auto u = s.project_tangent(x, A);
  EXPECT_NEAR((x.value.transpose() * u.value)(0, 0), 0.0, 1e-14);
  EXPECT_LT((s.project_tangent(x, u.value).value - u.value).norm(), 1e-14);
  EXPECT_NEAR(((A - u.value).transpose() * u.value)(0, 0), 0.0, 1e-13);
}

TEST(Sphere, ExpMatchesGeodesicOde) {
  RandomStream rng(2);
  const Sphere s(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = s.random_point(rng);
    const auto u = tangent_with_norm(s, x, 0.3 + 0.3 * trial, rng);
    const auto [p, v] = rk4_second_order(x.value, u.value, 2000, sphere_accel);
    EXPECT_LT((s.exp_map(x, u).value - p).norm(), 1e-9);
    EXPECT_LT((s.geodesic(x, u, 1.0).second - v).norm(), 1e-9);
  }
}

TEST(Sphere, LogInvertsExp) {
  RandomStream rng(3);
  const Sphere s(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = s.random_point(rng);
    const auto u = tangent_with_norm(s, x, 3.0 * rng.uniform(), rng);
    const auto y = s.exp_map(x, u);
    EXPECT_LT((s.log_map(x, y).value - u.value).norm(), 1e-9);
    EXPECT_NEAR(s.distance(x, y), u.value.norm(), 1e-12);
  }
}

TEST(Sphere, DistanceIsArcCosine) {
  RandomStream rng(4);
  const Sphere s(3);
  const auto x = s.random_point(rng), y = s.random_point(rng);
  EXPECT_NEAR(s.distance(x, y), std::acos((x.value.transpose() * y.value)(0, 0)), 1e-12);
  EXPECT_EQ(s.distance(x, x), 0.0);
}

TEST(Sphere, AntipodalLogThrows) {
  RandomStream rng(5);
  const Sphere s(4);
  const auto x = s.random_point(rng);
  EXPECT_THROW(s.log_map(x, ManifoldPoint{-x.value}), LogUndefined);
}

TEST(Sphere, RetractionsNormalize) {
  RandomStream rng(6);
  const Sphere s(4);
  const auto x = s.random_point(rng);
  const auto u = s.sample_tangent_gaussian(x, rng);
  const Matrix expect = (x.value + u.value) / (x.value + u.value).norm();
  for (auto k : {RetractionKind::QR, RetractionKind::Polar, RetractionKind::Projection})
    EXPECT_LT((s.retract(x, u, k).value - expect).norm(), 1e-14);
  EXPECT_THROW(s.retract(x, u, RetractionKind::EuclideanHorizontal), UnsupportedRetraction);
}

TEST(Sphere, TransportAlongMatchesOde) {
  RandomStream rng(7);
  const Sphere s(5);
  const auto x = s.random_point(rng);
  const auto u = tangent_with_norm(s, x, 1.2, rng);
  const auto v = s.sample_tangent_gaussian(x, rng);
  // Parallel field along the great circle: v' = -x (x'^T v).
  const int steps = 4000;
  const double h = 1.0 / steps;
  Matrix w = v.value;
  for (int i = 0; i < steps; ++i) {
    auto f = [&](double t, const Matrix& vv) {
      const auto [p, dp] = s.geodesic(x, u, t);
      return Matrix(-p * (dp.transpose() * vv)(0, 0));
    };
    const double t = i * h;
    const Matrix k1 = f(t, w), k2 = f(t + h / 2, w + h / 2 * k1), k3 = f(t + h / 2, w + h / 2 * k2),
                 k4 = f(t + h, w + h * k3);
    w += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  const auto moved = s.transport_along(x, u, v);
  EXPECT_LT((moved.value - w).norm(), 1e-10);
  EXPECT_NEAR(moved.value.norm(), v.value.norm(), 1e-12);
  EXPECT_NEAR((moved.base.transpose() * moved.value)(0, 0), 0.0, 1e-12);
}

TEST(Sphere, TransportMapsVelocityToVelocity) {
  RandomStream rng(8);
  const Sphere s(6);
  const auto x = s.random_point(rng);
  const auto u = tangent_with_norm(s, x, 0.9, rng);
  const auto y = s.exp_map(x, u);
  const auto moved = s.parallel_transport(x, y, u);
  EXPECT_LT((moved.value - s.geodesic(x, u, 1.0).second).norm(), 1e-12);
}
