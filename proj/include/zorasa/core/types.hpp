#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace zorasa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Frobenius tolerance for on-manifold and tangency checks.
inline constexpr double kFeasibilityTol = 1e-10;

enum class ManifoldKind { Sphere, Stiefel, Grassmann, FixedRankPSD };

enum class RetractionKind { QR, Polar, Projection, Exponential, EuclideanHorizontal };

inline const char* to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Sphere: return "sphere";
    case ManifoldKind::Stiefel: return "stiefel";
    case ManifoldKind::Grassmann: return "grassmann";
    case ManifoldKind::FixedRankPSD: return "fixed-rank-psd";
  }
  return "unknown";
}

inline const char* to_string(RetractionKind kind) {
  switch (kind) {
    case RetractionKind::QR: return "qr";
    case RetractionKind::Polar: return "polar";
    case RetractionKind::Projection: return "projection";
    case RetractionKind::Exponential: return "exponential";
    case RetractionKind::EuclideanHorizontal: return "euclidean-horizontal";
  }
  return "unknown";
}

struct ManifoldDescriptor {
  Index ambient_rows = 0;
  Index ambient_cols = 0;
  Index intrinsic_dim = 0;
  ManifoldKind kind = ManifoldKind::Stiefel;

  friend bool operator==(const ManifoldDescriptor&, const ManifoldDescriptor&) = default;
};

/// A point in its ambient matrix representation.
struct ManifoldPoint {
  Matrix value;
};

/// A tangent vector; `base` is a copy of the point it is attached to.
struct TangentVector {
  Matrix base;
  Matrix value;
};

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ZORASA_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

ZORASA_DEFINE_ERROR(BasePointMismatch);
ZORASA_DEFINE_ERROR(ShapeError);
ZORASA_DEFINE_ERROR(UnsupportedRetraction);
ZORASA_DEFINE_ERROR(UnsupportedOperation);
ZORASA_DEFINE_ERROR(NumericalRankError);
ZORASA_DEFINE_ERROR(NumericalError);
ZORASA_DEFINE_ERROR(LogUndefined);
ZORASA_DEFINE_ERROR(NotHorizontal);
ZORASA_DEFINE_ERROR(DomainError);
ZORASA_DEFINE_ERROR(OracleValueError);
ZORASA_DEFINE_ERROR(IntegrationError);
ZORASA_DEFINE_ERROR(ConfigError);
ZORASA_DEFINE_ERROR(IoError);

#undef ZORASA_DEFINE_ERROR

/// Closed-form intrinsic dimension. For the sphere `n` is the ambient
/// dimension and `r` must be 1.
inline Index dimension(ManifoldKind kind, Index n, Index r) {
  if (r < 1 || n < r) {
    throw DomainError("dimension: need n >= r >= 1 (n=" + std::to_string(n) +
                      ", r=" + std::to_string(r) + ")");
  }
  switch (kind) {
    case ManifoldKind::Sphere:
      if (r != 1) throw DomainError("dimension: sphere requires r == 1");
      return n - 1;
    case ManifoldKind::Stiefel: return n * r - r * (r + 1) / 2;
    case ManifoldKind::Grassmann: return r * (n - r);
    case ManifoldKind::FixedRankPSD: return n * r - r * (r - 1) / 2;
  }
  throw DomainError("dimension: unknown manifold kind");
}

inline void require_shape(const Matrix& A, Index rows, Index cols, const char* what) {
  if (A.rows() != rows || A.cols() != cols) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                     std::to_string(cols) + ", got " + std::to_string(A.rows()) + "x" +
                     std::to_string(A.cols()));
  }
}

}  // namespace zorasa
