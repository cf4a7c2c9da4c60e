#pragma once

#include "zorasa/core/types.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace zorasa::linalg {

inline Matrix skew(const Matrix& A) { return 0.5 * (A - A.transpose()); }
inline Matrix sym(const Matrix& A) { return 0.5 * (A + A.transpose()); }

struct QrFactors {
  Matrix Q;  // n x p, orthonormal columns
  Matrix R;  // p x p, upper triangular with positive diagonal
};

/// Thin QR with R normalized to a strictly positive diagonal, which makes the
/// factorization unique for full-column-rank input.
inline QrFactors qr_positive(const Matrix& A, double rank_tol = 1e-12) {
  const Index n = A.rows();
  const Index p = A.cols();
  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, p);
  Matrix R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  const double scale = std::max(1.0, R.diagonal().cwiseAbs().maxCoeff());
  for (Index j = 0; j < p; ++j) {
    if (std::abs(R(j, j)) <= rank_tol * scale) {
      throw NumericalRankError("qr_positive: input is numerically rank deficient");
    }
    if (R(j, j) < 0) {
      Q.col(j) *= -1.0;
      R.row(j) *= -1.0;
    }
  }
  return {std::move(Q), std::move(R)};
}

/// Thin SVD A = U diag(s) V^T with singular values in descending order.
struct ThinSvd {
  Matrix U;
  Vector s;
  Matrix V;
};

inline ThinSvd thin_svd(const Matrix& A) {
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

/// Orthogonal polar factor U V^T of a full-column-rank matrix; this is the
/// Frobenius-nearest matrix with orthonormal columns.
inline Matrix polar_factor(const Matrix& A, double rank_tol = 1e-12) {
  const ThinSvd svd = thin_svd(A);
  const double smax = svd.s.size() ? svd.s(0) : 0.0;
  if (svd.s.size() == 0 || svd.s(svd.s.size() - 1) <= rank_tol * std::max(1.0, smax)) {
    throw NumericalRankError("polar_factor: input is numerically rank deficient");
  }
  return svd.U * svd.V.transpose();
}

/// Solves  Omega * S + S * Omega = C  for symmetric positive definite S.
/// A skew-symmetric C yields a skew-symmetric Omega.
inline Matrix solve_symmetric_sylvester(const Matrix& S, const Matrix& C, double rank_tol = 1e-12) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
  if (eig.info() != Eigen::Success) throw NumericalError("sylvester: eigendecomposition failed");
  const Vector& lam = eig.eigenvalues();
  const double lmax = lam.cwiseAbs().maxCoeff();
  if (lam.minCoeff() <= rank_tol * std::max(1.0, lmax)) {
    throw NumericalRankError("sylvester: G^T G is numerically singular");
  }
  const Matrix& Q = eig.eigenvectors();
  Matrix Ct = Q.transpose() * C * Q;
  for (Index i = 0; i < Ct.rows(); ++i)
    for (Index j = 0; j < Ct.cols(); ++j) Ct(i, j) /= (lam(i) + lam(j));
  return Q * Ct * Q.transpose();
}

inline Matrix expm(const Matrix& A) {
  Matrix E = A.exp();
  if (!E.allFinite()) throw NumericalError("expm: non-finite result");
  return E;
}

inline double frobenius_inner(const Matrix& A, const Matrix& B) {
  return (A.array() * B.array()).sum();
}

/// Orthonormality defect ||X^T X - I||_F.
inline double orthonormality_residual(const Matrix& X) {
  return (X.transpose() * X - Matrix::Identity(X.cols(), X.cols())).norm();
}

}  // namespace zorasa::linalg
