#pragma once

#include <Eigen/Core>
#include <cmath>

#include "dysonlab/common.hpp"

namespace dysonlab {

// translation-invariant sine kernel parameterized by frequency rho > 0;
// the process it induces has one-point intensity rho / pi
struct KernelSpec {
  double rho = 3.141592653589793;

  double intensity() const { return rho / 3.141592653589793; }
  void validate() const {
    require(std::isfinite(rho) && rho > 0.0, ErrorCode::invalid_argument,
            "kernel frequency rho must be finite and positive");
  }
};

// K(x, y) = sin(rho (x - y)) / (pi (x - y)), continuously extended across the
// diagonal.  Evaluated through |x - y|, so K(x, y) == K(y, x) bit-for-bit.
template <class Scalar>
Scalar sine_kernel(Scalar x, Scalar y, Scalar rho) {
  constexpr Scalar pi = Scalar(3.141592653589793238462643L);
  const Scalar d = std::abs(x - y);
  const Scalar z = rho * d;
  if (z < Scalar(1e-4)) {
    // continuous extension: rho/pi * sinc(z), Taylor to below double rounding
    const Scalar z2 = z * z;
    return rho / pi * (Scalar(1) - z2 / Scalar(6) * (Scalar(1) - z2 / Scalar(20)));
  }
  return std::sin(z) / (pi * d);
}

inline double sine_kernel(double x, double y, const KernelSpec& spec) {
  return sine_kernel(x, y, spec.rho);
}

// Gram matrix [K(p_i, p_j)] for an arbitrary point vector
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> correlation_matrix(
    const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& pts,
    Scalar rho) {
  const Eigen::Index m = pts.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> k(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i) k(i, j) = sine_kernel(pts[i], pts[j], rho);
  return k;
}

struct CorrelationResult {
  double value = 0.0;
  bool degenerate = false;  // two evaluation points coincide within 1e-10
};

// m-point correlation det[K(p_i, p_j)].  Points are sorted internally before
// the matrix is assembled, so permutations of the input return bit-identical
// values.  Coincident points short-circuit to {0, degenerate}; determinants
// in [-1e-12, 0) round up to zero.
CorrelationResult correlation_m(const Eigen::Ref<const Eigen::VectorXd>& points,
                                const KernelSpec& spec);

// small-separation approximation (rho/pi)^2 (rho u)^2 / 3 of the two-point
// function; requires |rho u| < 1
double pair_correlation_small_u(double u, const KernelSpec& spec);

// exact two-point function (rho/pi)^2 (1 - sinc^2(rho u))
double pair_correlation(double u, const KernelSpec& spec);

}  // namespace dysonlab
