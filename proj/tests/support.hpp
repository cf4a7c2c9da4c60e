#pragma once

#include "zorasa/bench/problems.hpp"
#include "zorasa/zorasa.hpp"

#include <cmath>

namespace zorasa::testing {

// Scaled Gaussian tangent vector with the given norm.
template <class M>
TangentVector tangent_with_norm(const M& m, const ManifoldPoint& x, double norm, RandomStream& rng) {
  TangentVector u = m.sample_tangent_gaussian(x, rng);
  u.value *= norm / u.value.norm();
  return u;
}

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Classical RK4 for y' = f(y) on [0, 1] in `steps` steps, for second-order
// systems written as (position, velocity) pairs.
template <class F>
std::pair<Matrix, Matrix> rk4_second_order(const Matrix& p0, const Matrix& v0, int steps, F accel) {
  Matrix p = p0, v = v0;
  const double h = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    const Matrix a1 = accel(p, v);
    const Matrix p2 = p + 0.5 * h * v, v2 = v + 0.5 * h * a1;
    const Matrix a2 = accel(p2, v2);
    const Matrix p3 = p + 0.5 * h * v2, v3 = v + 0.5 * h * a2;
    const Matrix a3 = accel(p3, v3);
    const Matrix p4 = p + h * v3, v4 = v + h * a3;
    const Matrix a4 = accel(p4, v4);
    p += h / 6.0 * (v + 2 * v2 + 2 * v3 + v4);
    v += h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
  }
  return {p, v};
}

}  // namespace zorasa::testing
