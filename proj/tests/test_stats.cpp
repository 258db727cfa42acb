#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dysonlab/rng.hpp"
#include "dysonlab/stats.hpp"

using namespace dysonlab;

namespace {
constexpr double kPi = 3.141592653589793;
}

TEST_CASE("summarize computes exact small-sample moments") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const MeanVar mv = summarize(xs);
  CHECK(mv.mean == 2.5);
  CHECK(mv.var == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(mv.n == 4);
  CHECK(mv.se_mean() == doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-14));
}

TEST_CASE("anchored mean of a constant series is that constant exactly") {
  const std::vector<double> xs(1000, 0.7317315341);
  CHECK(anchored_mean(xs) == 0.7317315341);
}

TEST_CASE("one-sample KS statistic on a hand-checked example") {
  const std::vector<double> xs{0.75, 0.25, 0.5};  // sorted internally
  const double d =
      ks_statistic(xs, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(d == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("two-sample KS reaches one on disjoint samples") {
  const std::vector<double> lo{1.0, 2.0, 3.0};
  const std::vector<double> hi{10.0, 11.0, 12.0};
  CHECK(ks_two_sample(lo, hi) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kolmogorov survival function matches tabulated values") {
  CHECK(kolmogorov_sf(0.5) == doctest::Approx(0.9639452436).epsilon(1e-6));
  CHECK(kolmogorov_sf(1.0) == doctest::Approx(0.2699996717).epsilon(1e-6));
  CHECK(kolmogorov_sf(2.0) == doctest::Approx(6.7092e-4).epsilon(1e-3));
}

TEST_CASE("ks p-values shrink with distance and sample size") {
  CHECK(ks_pvalue(0.05, 1000.0) > ks_pvalue(0.10, 1000.0));
  CHECK(ks_pvalue(0.05, 1000.0) > ks_pvalue(0.05, 4000.0));
  CHECK(ks_two_sample_pvalue(0.05, 1000.0, 1000.0) >
        ks_two_sample_pvalue(0.20, 1000.0, 1000.0));
}

TEST_CASE("chi-square survival has exact even-dof forms") {
  CHECK(chi2_sf(3.0, 2.0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
  CHECK(chi2_sf(5.0, 4.0) ==
        doctest::Approx(std::exp(-2.5) * (1.0 + 2.5)).epsilon(1e-12));
}

TEST_CASE("gamma p and q are complementary") {
  for (double a : {0.5, 3.0, 7.5})
    for (double x : {0.3, 2.0, 9.0})
      CHECK(gamma_p(a, x) + gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normal cdf reference points") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
  CHECK(normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-7));
}

TEST_CASE("semicircle cdf endpoints, center, and an interior value") {
  CHECK(semicircle_cdf(-2.0) == doctest::Approx(0.0));
  CHECK(semicircle_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(semicircle_cdf(2.0) == doctest::Approx(1.0).epsilon(1e-12));
  const double f1 = 0.5 + (std::sqrt(3.0) / 2.0 + 2.0 * std::asin(0.5)) / (2.0 * kPi);
  CHECK(semicircle_cdf(1.0) == doctest::Approx(f1).epsilon(1e-9));
  CHECK(semicircle_cdf(-3.0) == doctest::Approx(0.0));
  CHECK(semicircle_cdf(3.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("line fit recovers exact coefficients") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0};
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 * v + 1.0);
  const LineFit lf = fit_line(x, y);
  CHECK(lf.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(lf.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lf.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lf.slope_se == doctest::Approx(0.0));
}

TEST_CASE("batch means widen error bars on correlated series") {
  CounterRng r(SamplerSeed{5, 0});
  const std::size_t n = 16384;
  std::vector<double> iid(n), cor(n);
  for (double& x : iid) x = r.next_normal();
  double carry = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    carry = 0.9 * carry + std::sqrt(1.0 - 0.81) * r.next_normal();
    cor[i] = carry;
  }
  const BatchMeans bi = batch_means(iid);
  const BatchMeans bc = batch_means(cor);
  CHECK(bi.se == doctest::Approx(1.0 / std::sqrt(static_cast<double>(n))).epsilon(0.4));
  CHECK(bc.se > 2.0 * bi.se);  // integrated time (1+0.9)/(1-0.9) = 19
  CHECK(bc.batches >= 20);
  CHECK(bc.lag1 <= 0.2);  // the stopping rule held at the returned batch length
}

TEST_CASE("batch means refuse a short strongly-correlated series") {
  std::vector<double> xs(64);
  for (std::size_t i = 0; i < xs.size(); ++i)
    xs[i] = ((i / 16) % 2 == 0) ? -1.0 : 1.0;
  CHECK_THROWS_AS((void)batch_means(xs), SimError);
}

TEST_CASE("autocorrelation of an alternating series") {
  std::vector<double> xs(4096);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = (i % 2 == 0) ? -1.0 : 1.0;
  const std::vector<double> r = autocorrelation(xs, 4);
  REQUIRE(r.size() == 4);
  CHECK(r[0] == doctest::Approx(-1.0).epsilon(1e-3));  // lag one
  CHECK(r[1] == doctest::Approx(1.0).epsilon(1e-3));   // lag two
}

TEST_CASE("integrated autocorrelation time floors at one half") {
  CounterRng r(SamplerSeed{6, 0});
  std::vector<double> white(32768);
  for (double& x : white) x = r.next_normal();
  CHECK(integrated_autocorr_time(white) == doctest::Approx(0.5).epsilon(0.25));

  // duplicated draws double the integrated time
  std::vector<double> paired(32768);
  for (std::size_t i = 0; i < paired.size(); i += 2) {
    const double v = r.next_normal();
    paired[i] = v;
    paired[i + 1] = v;
  }
  CHECK(integrated_autocorr_time(paired) == doctest::Approx(1.0).epsilon(0.25));
}
