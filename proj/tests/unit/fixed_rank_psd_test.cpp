#include "support.hpp"

#include <gtest/gtest.h>

using namespace zorasa;

TEST(FixedRankPsd, ProjectionIsHorizontal) {
  RandomStream rng(1);
  const FixedRankPsd m(8, 3);
  const auto x = m.random_point(rng);
  const auto h = m.project_tangent(x, rng.normal_matrix(8, 3));
  const Matrix GtH = x.value.transpose() * h.value;
  EXPECT_LT((GtH - GtH.transpose()).norm(), 1e-10);
  EXPECT_LT((m.project_tangent(x, h.value).value - h.value).norm(), 1e-10);
}

TEST(FixedRankPsd, VerticalComponentSolvesSylvester) {
  RandomStream rng(2);
  const FixedRankPsd m(10, 4);
  const auto x = m.random_point(rng);
  const Matrix A = rng.normal_matrix(10, 4);
  const Matrix Om = m.vertical_component(x, A);
  const Matrix S = x.value.transpose() * x.value;
  const Matrix C = x.value.transpose() * A - A.transpose() * x.value;
  EXPECT_LT((Om * S + S * Om - C).norm(), 1e-10 * C.norm());
  EXPECT_LT((Om + Om.transpose()).norm(), 1e-12);
  EXPECT_LT((m.project_tangent(x, A).value - (A - x.value * Om)).norm(), 1e-14);
}

TEST(FixedRankPsd, VerticalDirectionsProjectToZero) {
  RandomStream rng(3);
  const FixedRankPsd m(7, 3);
  const auto x = m.random_point(rng);
  const Matrix Om = linalg::skew(rng.normal_matrix(3, 3));
  EXPECT_LT(m.project_tangent(x, x.value * Om).value.norm(), 1e-10);
}

TEST(FixedRankPsd, ProjectionIsOrthogonal) {
  RandomStream rng(4);
  const FixedRankPsd m(7, 3);
  const auto x = m.random_point(rng);
  const Matrix A = rng.normal_matrix(7, 3);
  const Matrix H = m.project_tangent(x, A).value;
  const Matrix V = x.value * linalg::skew(rng.normal_matrix(3, 3));
  EXPECT_NEAR(linalg::frobenius_inner(H, V), 0.0, 1e-10);
  EXPECT_NEAR(linalg::frobenius_inner(A - H, H), 0.0, 1e-10);
}

TEST(FixedRankPsd, GramIsRotationInvariant) {
  RandomStream rng(5);
  const FixedRankPsd m(6, 2);
  const auto x = m.random_point(rng);
  const Matrix O = linalg::qr_positive(rng.normal_matrix(2, 2)).Q;
  const ManifoldPoint y{x.value * O};
  EXPECT_LT((FixedRankPsd::gram(x) - FixedRankPsd::gram(y)).norm(), 1e-12);
  EXPECT_NEAR(m.distance(x, y), 0.0, 1e-6);
}

TEST(FixedRankPsd, DistanceIsProcrustesMinimum) {
  RandomStream rng(6);
  const FixedRankPsd m(6, 2);
  const auto x = m.random_point(rng), y = m.random_point(rng);
  const double d = m.distance(x, y);
  // Brute-force over planar rotations and reflections.
  double best = 1e300;
  for (int i = 0; i < 20000; ++i) {
    const double a = 2 * M_PI * i / 20000.0;
    Matrix R(2, 2);
    R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    Matrix F = R;
    F.col(1) *= -1;
    best = std::min({best, (x.value - y.value * R).norm(), (x.value - y.value * F).norm()});
  }
  EXPECT_NEAR(d, best, 1e-6);
}

TEST(FixedRankPsd, LogGivesAlignedDifference) {
  RandomStream rng(7);
  const FixedRankPsd m(6, 3);
  const auto x = m.random_point(rng), y = m.random_point(rng);
  const auto u = m.log_map(x, y);
  EXPECT_NEAR(u.value.norm(), m.distance(x, y), 1e-10);
  const Matrix Z = x.value + u.value;
  EXPECT_LT((Z * Z.transpose() - FixedRankPsd::gram(y)).norm(), 1e-10);
  const Matrix GtU = x.value.transpose() * u.value;
  EXPECT_LT((GtU - GtU.transpose()).norm(), 1e-10);
}

TEST(FixedRankPsd, RetractionIsAddition) {
  RandomStream rng(8);
  const FixedRankPsd m(6, 2);
  const auto x = m.random_point(rng);
  const auto h = m.sample_tangent_gaussian(x, rng);
  EXPECT_EQ(m.retract(x, h, RetractionKind::EuclideanHorizontal).value, x.value + h.value);
  EXPECT_EQ(m.exp_map(x, h).value, x.value + h.value);
  EXPECT_THROW(m.retract(x, h, RetractionKind::QR), UnsupportedRetraction);
}

TEST(FixedRankPsd, RankLossThrows) {
  Matrix G = Matrix::Zero(4, 2);
  G(0, 0) = 1.0;
  G(1, 1) = 1.0;
  const FixedRankPsd m(4, 2);
  const ManifoldPoint x{G};
  Matrix H = Matrix::Zero(4, 2);
  H(1, 1) = -1.0;
  EXPECT_THROW(m.retract(x, m.make_tangent(x, H), RetractionKind::EuclideanHorizontal), NumericalRankError);
  EXPECT_TRUE(std::isinf(m.feasibility_residual(ManifoldPoint{G + H})));
}

TEST(FixedRankPsd, NoParallelTransport) {
  RandomStream rng(9);
  const FixedRankPsd m(5, 2);
  const auto x = m.random_point(rng);
  EXPECT_THROW(m.parallel_transport(x, x, m.zero_vector(x)), UnsupportedOperation);
}
