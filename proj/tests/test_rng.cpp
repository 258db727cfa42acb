#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dysonlab/rng.hpp"
#include "dysonlab/stats.hpp"

using namespace dysonlab;

TEST_CASE("identical seeds reproduce the draw sequence") {
  CounterRng a(SamplerSeed{42, 7});
  CounterRng b(SamplerSeed{42, 7});
  bool same = true;
  for (int i = 0; i < 1000; ++i) same &= (a.next_u64() == b.next_u64());
  CHECK(same);
}

TEST_CASE("distinct streams from one seed differ everywhere early") {
  CounterRng a(SamplerSeed{42, 0});
  CounterRng b(SamplerSeed{42, 1});
  int collisions = 0;
  for (int i = 0; i < 256; ++i) collisions += (a.next_u64() == b.next_u64());
  CHECK(collisions == 0);
}

TEST_CASE("restoring the counter resumes the exact sequence") {
  CounterRng a(SamplerSeed{9, 3});
  for (int i = 0; i < 37; ++i) (void)a.next_normal();
  const std::uint64_t mark = a.counter();
  std::vector<double> ahead(50);
  for (double& x : ahead) x = a.next_double();

  CounterRng b(SamplerSeed{9, 3});
  b.set_counter(mark);
  bool same = true;
  for (double x : ahead) same &= (b.next_double() == x);
  CHECK(same);
}

TEST_CASE("uniform variants respect their half-open ranges") {
  CounterRng r(SamplerSeed{1, 0});
  bool ok = true;
  for (int i = 0; i < 20000; ++i) {
    const double u = r.next_double();
    const double v = r.next_open();
    ok &= (u >= 0.0 && u < 1.0 && v > 0.0 && v <= 1.0);
  }
  CHECK(ok);
}

TEST_CASE("normal draws have standard moments") {
  CounterRng r(SamplerSeed{2, 0});
  const std::size_t n = 200000;
  std::vector<double> xs(n);
  for (double& x : xs) x = r.next_normal();
  const MeanVar mv = summarize(xs);
  CHECK(std::abs(mv.mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(mv.var - 1.0) < 4.0 * mv.se_var());
}

TEST_CASE("fill_normal is deterministic and standard, odd lengths included") {
  CounterRng a(SamplerSeed{3, 1});
  CounterRng b(SamplerSeed{3, 1});
  Eigen::VectorXd x(10001), y(10001);
  a.fill_normal(x);
  b.fill_normal(y);
  CHECK((x.array() == y.array()).all());
  CHECK(a.counter() == b.counter());

  const std::vector<double> v(x.data(), x.data() + x.size());
  const MeanVar mv = summarize(v);
  CHECK(std::abs(mv.mean) < 4.0 / std::sqrt(10001.0));
  CHECK(std::abs(mv.var - 1.0) < 4.0 * mv.se_var());
}

TEST_CASE("exponential, gamma, and chi draws match known moments") {
  CounterRng r(SamplerSeed{4, 0});
  const std::size_t n = 100000;
  std::vector<double> e(n), g(n), c2(n);
  for (double& x : e) x = r.next_exponential(2.0);
  for (double& x : g) x = r.next_gamma(3.5);
  for (double& x : c2) {
    const double v = r.next_chi_even(6);
    x = v * v;
  }
  const MeanVar me = summarize(e);
  const MeanVar mg = summarize(g);
  const MeanVar mc = summarize(c2);
  CHECK(std::abs(me.mean - 0.5) < 4.0 * me.se_mean());
  CHECK(std::abs(mg.mean - 3.5) < 4.0 * mg.se_mean());
  CHECK(std::abs(mg.var - 3.5) < 4.0 * mg.se_var());
  CHECK(std::abs(mc.mean - 6.0) < 4.0 * mc.se_mean());
  CHECK(std::abs(mc.var - 12.0) < 4.0 * mc.se_var());
}

TEST_CASE("invalid distribution parameters are rejected") {
  CounterRng r(SamplerSeed{5, 0});
  CHECK_THROWS_AS((void)r.next_exponential(0.0), SimError);
  CHECK_THROWS_AS((void)r.next_gamma(0.5), SimError);
  CHECK_THROWS_AS((void)r.next_chi_even(3), SimError);
}
