#include "support.hpp"

#include <gtest/gtest.h>

using namespace zorasa;

static_assert(Manifold<Sphere>);
static_assert(Manifold<Stiefel>);
static_assert(Manifold<Grassmann>);
static_assert(Manifold<FixedRankPsd>);
static_assert(ParallelTransportManifold<Sphere>);
static_assert(ParallelTransportManifold<Grassmann>);
static_assert(ParallelTransportManifold<Stiefel>);

TEST(ManifoldBase, InnerIsFrobenius) {
  RandomStream rng(1);
  const Stiefel st(6, 2);
  const auto x = st.random_point(rng);
  const auto u = st.sample_tangent_gaussian(x, rng);
  const auto v = st.sample_tangent_gaussian(x, rng);
  EXPECT_DOUBLE_EQ(st.inner(x, u, v), (u.value.array() * v.value.array()).sum());
  EXPECT_DOUBLE_EQ(st.norm(x, u), u.value.norm());
}

TEST(ManifoldBase, ForeignTangentIsRejected) {
  RandomStream rng(2);
  const Grassmann gr(6, 2);
  const auto x = gr.random_point(rng);
  const auto y = gr.random_point(rng);
  const auto u = gr.sample_tangent_gaussian(x, rng);
  EXPECT_THROW(gr.norm(y, u), BasePointMismatch);
  EXPECT_THROW(gr.retract(y, u, RetractionKind::QR), BasePointMismatch);
  EXPECT_THROW(gr.vector_transport(y, u, u, RetractionKind::QR), BasePointMismatch);
}

TEST(ManifoldBase, WrongShapeIsRejected) {
  RandomStream rng(3);
  const Stiefel st(6, 2);
  const auto x = st.random_point(rng);
  EXPECT_THROW(st.project_tangent(x, Matrix::Zero(6, 3)), ShapeError);
  EXPECT_THROW(st.make_tangent(x, Matrix::Zero(5, 2)), ShapeError);
  EXPECT_THROW(st.feasibility_residual(ManifoldPoint{Matrix::Zero(2, 2)}), ShapeError);
}

TEST(ManifoldBase, VectorTransportIsProjectionAtRetraction) {
  RandomStream rng(4);
  const Stiefel st(7, 3);
  const auto x = st.random_point(rng);
  const auto u = st.scaled(st.sample_tangent_gaussian(x, rng), 0.3);
  const auto v = st.sample_tangent_gaussian(x, rng);
  const auto t = st.vector_transport(x, u, v, RetractionKind::QR);
  const Matrix Y = st.retract(x, u, RetractionKind::QR).value;
  EXPECT_EQ(t.base, Y);
  const Matrix YtT = Y.transpose() * t.value;
  EXPECT_LT((YtT + YtT.transpose()).norm(), 1e-12);
  // Projection is the closest tangent matrix to v.
  const auto w = st.project_tangent(ManifoldPoint{Y}, rng.normal_matrix(7, 3));
  EXPECT_LE((t.value - v.value).norm(), (t.value + 0.1 * w.value - v.value).norm() + 1e-12);
}

TEST(ManifoldBase, TangentGaussianSecondMomentIsDimension) {
  RandomStream rng(5);
  const Stiefel st(10, 5);
  const auto x = st.random_point(rng);
  const int n = 40000;
  double acc = 0;
  for (int i = 0; i < n; ++i) acc += st.sample_tangent_gaussian(x, rng).value.squaredNorm();
  // ||u||^2 is chi-square with 35 degrees of freedom: sd sqrt(70 / n).
  EXPECT_NEAR(acc / n, 35.0, 5 * std::sqrt(70.0 / n));
}

TEST(ManifoldBase, TangentGaussianIsIsotropic) {
  RandomStream rng(6);
  const Sphere s(4);
  const auto x = s.random_point(rng);
  const int n = 100000;
  Matrix C = Matrix::Zero(4, 4);
  for (int i = 0; i < n; ++i) {
    const Matrix u = s.sample_tangent_gaussian(x, rng).value;
    C += u * u.transpose();
  }
  C /= n;
  const Matrix P = Matrix::Identity(4, 4) - x.value * x.value.transpose();
  EXPECT_LT((C - P).cwiseAbs().maxCoeff(), 0.02);
}

TEST(ManifoldBase, DescriptorsReportIntrinsicDimension) {
  EXPECT_EQ(Stiefel(10, 5).descriptor().intrinsic_dim, 35);
  EXPECT_EQ(FixedRankPsd(10, 5).descriptor().intrinsic_dim, 40);
  EXPECT_EQ(Grassmann(10, 5).descriptor().intrinsic_dim, 25);
  EXPECT_EQ(Sphere(10).descriptor().intrinsic_dim, 9);
  EXPECT_EQ(Sphere(10).descriptor().ambient_cols, 1);
}

TEST(ManifoldBase, ConstructorsRejectBadSizes) {
  EXPECT_THROW(Stiefel(3, 4), DomainError);
  EXPECT_THROW(Grassmann(4, 4), DomainError);
  EXPECT_THROW(FixedRankPsd(3, 4), DomainError);
  EXPECT_THROW(Sphere(0), DomainError);
}

TEST(ManifoldBase, ZeroStepRetractionIsIdentity) {
  RandomStream rng(7);
  const Grassmann gr(6, 2);
  const auto x = gr.random_point(rng);
  for (auto k : {RetractionKind::QR, RetractionKind::Polar, RetractionKind::Exponential})
    EXPECT_EQ(gr.retract(x, gr.zero_vector(x), k).value, x.value);
}
