#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "dysonlab/kernel.hpp"
#include "dysonlab/rng.hpp"

using namespace dysonlab;

namespace {

constexpr double kPi = 3.141592653589793;

// independent determinant oracle: direct Laplace cofactor expansion
double cofactor_det(const Eigen::MatrixXd& a) {
  const Eigen::Index m = a.rows();
  if (m == 1) return a(0, 0);
  double det = 0.0, sign = 1.0;
  Eigen::MatrixXd minor(m - 1, m - 1);
  for (Eigen::Index c = 0; c < m; ++c) {
    for (Eigen::Index i = 1; i < m; ++i) {
      Eigen::Index col = 0;
      for (Eigen::Index j = 0; j < m; ++j)
        if (j != c) minor(i - 1, col++) = a(i, j);
    }
    det += sign * a(0, c) * cofactor_det(minor);
    sign = -sign;
  }
  return det;
}

}  // namespace

TEST_CASE("kernel diagonal equals the intensity and is bit-symmetric") {
  const KernelSpec ks{};
  CHECK(sine_kernel(2.0, 2.0, ks) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(KernelSpec{2.5}.intensity() == doctest::Approx(2.5 / kPi).epsilon(1e-15));

  CounterRng r(SamplerSeed{11, 0});
  bool symmetric = true;
  for (int i = 0; i < 300; ++i) {
    const double x = 8.0 * r.next_double() - 4.0;
    const double y = 8.0 * r.next_double() - 4.0;
    symmetric &= (sine_kernel(x, y, ks) == sine_kernel(y, x, ks));
  }
  CHECK(symmetric);
}

TEST_CASE("taylor branch joins the sine branch continuously") {
  const double rho = 2.3;
  const double d0 = 1e-4 / rho;  // branch switch separation
  const double below = sine_kernel(0.0, d0 * 0.999999, rho);
  const double above = sine_kernel(0.0, d0 * 1.000001, rho);
  CHECK(std::abs(below - above) < 1e-10 * std::abs(above));
}

TEST_CASE("one and two point correlations have closed forms") {
  const KernelSpec ks{1.9};
  Eigen::VectorXd p1(1);
  p1 << 0.37;
  CHECK(correlation_m(p1, ks).value == doctest::Approx(1.9 / kPi).epsilon(1e-14));

  Eigen::VectorXd p2(2);
  p2 << -0.4, 0.85;
  CHECK(correlation_m(p2, ks).value ==
        doctest::Approx(pair_correlation(1.25, ks)).epsilon(1e-12));
}

TEST_CASE("determinants up to m=6 match the cofactor oracle") {
  CounterRng rng(SamplerSeed{21, 0});
  for (int m = 1; m <= 6; ++m) {
    for (int trial = 0; trial < 6; ++trial) {
      // well-separated points keep the determinant away from the
      // conditioning floor where no method retains relative accuracy
      Eigen::VectorXd p(m);
      double x = -6.0 + 2.0 * rng.next_double();
      for (int i = 0; i < m; ++i) {
        p[i] = x;
        x += 0.8 + 1.4 * rng.next_double();
      }
      for (double rho : {kPi, 1.6}) {
        const double via_lu = correlation_m(p, KernelSpec{rho}).value;
        const double via_cof = cofactor_det(correlation_matrix<double>(p, rho));
        CHECK(via_lu == doctest::Approx(via_cof).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("permutations and dyadic translations leave the value bit-identical") {
  const KernelSpec ks{};
  Eigen::VectorXd p(5);
  p << -3.25, -1.5, 0.625, 2.0, 4.75;  // exactly representable coordinates
  const double base = correlation_m(p, ks).value;

  Eigen::VectorXd rev = p.reverse();
  CHECK(correlation_m(rev, ks).value == base);

  Eigen::VectorXd rot(5);
  rot << p[2], p[4], p[0], p[3], p[1];
  CHECK(correlation_m(rot, ks).value == base);

  for (double shift : {1.0, -2.0, 0.5, -0.25}) {
    const Eigen::VectorXd moved = (p.array() + shift).matrix();
    CHECK(correlation_m(moved, ks).value == base);
  }
}

TEST_CASE("coincident points short-circuit to a degenerate zero") {
  const KernelSpec ks{};
  Eigen::VectorXd p(3);
  p << -1.0, 0.5, 0.5 + 5e-11;
  const CorrelationResult r = correlation_m(p, ks);
  CHECK(r.degenerate);
  CHECK(r.value == 0.0);

  Eigen::VectorXd q(2);
  q << -1.0, 0.5;
  CHECK_FALSE(correlation_m(q, ks).degenerate);
}

TEST_CASE("small-separation law approximates the exact curve near zero") {
  const KernelSpec ks{};
  const double exact = pair_correlation(0.25, ks);
  const double quad = pair_correlation_small_u(0.25, ks);
  CHECK(std::abs(quad - exact) <= 0.1 * exact);
  // outside its radius of validity the approximation refuses to answer
  CHECK_THROWS_AS((void)pair_correlation_small_u(0.5, ks), SimError);
}

TEST_CASE("kernel parameters are validated") {
  CHECK_THROWS_AS(KernelSpec{-1.0}.validate(), SimError);
  CHECK_THROWS_AS(KernelSpec{0.0}.validate(), SimError);
  Eigen::VectorXd bad(1);
  bad << std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS((void)correlation_m(bad, KernelSpec{}), SimError);
}
