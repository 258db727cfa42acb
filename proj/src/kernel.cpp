#include "dysonlab/kernel.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <vector>

namespace dysonlab {

CorrelationResult correlation_m(const Eigen::Ref<const Eigen::VectorXd>& points,
                                const KernelSpec& spec) {
  spec.validate();
  const Eigen::Index m = points.size();
  require(m >= 1, ErrorCode::invalid_argument, "correlation order must be >= 1");
  for (Eigen::Index i = 0; i < m; ++i)
    require(std::isfinite(points[i]), ErrorCode::invalid_argument,
            "correlation points must be finite");

  // canonical order makes the determinant permutation-invariant bit-for-bit
  Eigen::VectorXd p = points;
  std::sort(p.data(), p.data() + m);

  for (Eigen::Index i = 0; i + 1 < m; ++i)
    if (p[i + 1] - p[i] < 1e-10) return {0.0, true};

  if (m == 1) return {spec.intensity(), false};

  const Eigen::MatrixXd k = correlation_matrix<double>(p, spec.rho);
  double det = Eigen::PartialPivLU<Eigen::MatrixXd>(k).determinant();
  if (det < 0.0 && det >= -1e-12) det = 0.0;
  return {det, false};
}

double pair_correlation_small_u(double u, const KernelSpec& spec) {
  spec.validate();
  const double z = spec.rho * std::abs(u);
  require(z < 1.0, ErrorCode::out_of_range,
          "small-separation form requires |rho u| < 1");
  const double i1 = spec.intensity();
  return i1 * i1 * z * z / 3.0;
}

double pair_correlation(double u, const KernelSpec& spec) {
  spec.validate();
  const double i1 = spec.intensity();
  const double k = sine_kernel(u, 0.0, spec.rho);
  return i1 * i1 - k * k;
}

}  // namespace dysonlab
