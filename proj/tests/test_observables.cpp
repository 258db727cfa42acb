#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "dysonlab/observables.hpp"
#include "dysonlab/sampling.hpp"

using namespace dysonlab;

namespace {

PointConfiguration fixed_config(Interval w, std::initializer_list<double> xs) {
  PointConfiguration c;
  c.window = w;
  c.points.resize(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) c.points[i++] = x;
  return c;
}

}  // namespace

TEST_CASE("scalar observables evaluate to hand values") {
  const std::vector<double> pts{-2.0, 0.0, 0.5, 2.0};
  const std::vector<double> peak{0.0};
  const std::vector<double> edge{1.0};
  const std::vector<double> half{0.5};
  const std::vector<double> away{-3.0, 4.0};
  const std::vector<double> trio{1.5, 0.5, 3.0};

  ObservableSpec count{ObservableKind::count_in_window, {-1.0, 1.0}, {}};
  CHECK(eval_observable(count, pts) == 2.0);

  ObservableSpec lin{ObservableKind::linear_statistic, {-1.0, 1.0}, {}};
  CHECK(eval_observable(lin, peak) == 1.0);  // bump peak
  CHECK(eval_observable(lin, edge) == 0.0);  // support edge
  CHECK(eval_observable(lin, half) == doctest::Approx(0.5).epsilon(1e-12));

  ObservableSpec gap{ObservableKind::indicator_of_gap, {-1.0, 1.0}, {}};
  CHECK(eval_observable(gap, away) == 1.0);
  CHECK(eval_observable(gap, pts) == 0.0);

  // 1 + 2(x-c) + 3(x-c)^2 around c = 1 on [0, 2]
  ObservableSpec poly{ObservableKind::polynomial_local, {0.0, 2.0}, {1.0, 2.0, 3.0}};
  CHECK(eval_observable(poly, trio) == 3.5);

  ObservableSpec bad{ObservableKind::polynomial_local, {0.0, 2.0}, {}};
  CHECK_THROWS_AS((void)eval_observable(bad, pts), SimError);
}

TEST_CASE("one-point estimator is exact on bin-center configurations") {
  const Interval w{0.0, 4.0};
  const PointConfiguration c = fixed_config(w, {0.5, 1.5, 2.5, 3.5});
  const std::vector<PointConfiguration> configs{c, c};

  const Curve curve = estimate_one_point(configs, 4);
  REQUIRE(curve.x.size() == 4);
  CHECK(curve.n == 2);
  for (int b = 0; b < 4; ++b) {
    CHECK(curve.x[b] == 0.5 + b);
    CHECK(curve.value[b] == 1.0);
    CHECK(curve.se[b] == 0.0);
  }

  const std::vector<PointConfiguration> mixed{
      c, fixed_config({0.0, 5.0}, {1.0, 2.0})};
  CHECK_THROWS_AS((void)estimate_one_point(mixed, 4), SimError);
}

TEST_CASE("two-point estimator recovers the flat poisson pair density") {
  const Interval w{0.0, 20.0};
  std::vector<PointConfiguration> configs;
  configs.reserve(3000);
  for (int k = 0; k < 3000; ++k)
    configs.push_back(sample_poisson(1.0, w, SamplerSeed{4100, static_cast<std::uint64_t>(k)}));

  const std::vector<double> seps{2.0};
  const Curve curve = estimate_two_point(configs, seps, 0.5);
  REQUIRE(curve.x.size() == 1);
  CHECK(curve.x[0] == 2.0);
  CHECK(std::abs(curve.value[0] - 1.0) <= 4.0 * curve.se[0]);
  CHECK(curve.se[0] < 0.05);

  const std::vector<double> crowded{1.0, 1.5};
  CHECK_THROWS_AS((void)estimate_two_point(configs, crowded, 0.5), SimError);

  try {
    const std::vector<double> huge{25.0};
    (void)estimate_two_point(configs, huge, 0.5);
    FAIL("expected invalid-argument");
  } catch (const SimError& e) {
    CHECK(e.code() == ErrorCode::invalid_argument);
  }
}

TEST_CASE("rigidity regression separates independent from slaved counts") {
  // poisson: the exterior carries no information about the interior count
  std::vector<PointConfiguration> noise;
  for (int k = 0; k < 400; ++k)
    noise.push_back(
        sample_poisson(1.0, {-8.0, 8.0}, SamplerSeed{4200, static_cast<std::uint64_t>(k)}));
  const std::vector<double> widths{1.0, 2.0};
  const RigidityResult rp = rigidity_statistic(noise, {-2.0, 2.0}, widths);
  REQUIRE(rp.unexplained.size() == 2);
  CHECK(rp.var_count > 0.0);
  for (double u : rp.unexplained) CHECK(u > 0.9);

  // constructed configurations whose exterior cluster size determines the
  // interior count exactly (up to the tiny intra-cluster spread)
  std::vector<PointConfiguration> slaved;
  for (int k = 0; k < 64; ++k) {
    const int inside = 3 + k % 6;
    PointConfiguration c;
    c.window = Interval{-6.0, 6.0};
    c.points.resize(10);
    Eigen::Index at = 0;
    for (int i = 0; i < inside; ++i)
      c.points[at++] = -1.5 + 3.0 * i / std::max(inside - 1, 1);
    for (int i = 0; at < 10; ++i)
      c.points[at++] = 2.5 + 0.001 * i;  // half a unit outside, seen by every taper
    slaved.push_back(std::move(c));
  }
  const RigidityResult rs = rigidity_statistic(slaved, {-2.0, 2.0}, widths);
  CHECK(rs.var_count > 0.0);
  for (double u : rs.unexplained) CHECK(u < 0.05);

  CHECK_THROWS_AS((void)rigidity_statistic(noise, {-2.0, 2.0}, std::vector<double>{7.0}),
                  SimError);  // taper pokes outside the window
}

TEST_CASE("tagged msd core is exact and gates on exclusions") {
  const std::vector<double> times{1.0, 2.0};
  const std::vector<std::vector<double>> tagged{{0.0, 1.0, 2.0}, {0.0, -1.0, -2.0}};

  const Curve msd = tagged_msd_from_positions(tagged, times, 2);
  REQUIRE(msd.x.size() == 2);
  CHECK(msd.value[0] == 1.0);
  CHECK(msd.value[1] == 4.0);
  CHECK(msd.se[0] == 0.0);
  CHECK(msd.se[1] == 0.0);
  CHECK(msd.n == 2);

  try {
    (void)tagged_msd_from_positions(tagged, times, 3);  // 1/3 excluded
    FAIL("expected too-many-escapes");
  } catch (const SimError& e) {
    CHECK(e.code() == ErrorCode::too_many_escapes);
  }

  const std::vector<std::vector<double>> short_rows{{0.0, 1.0}, {0.0, -1.0}};
  CHECK_THROWS_AS((void)tagged_msd_from_positions(short_rows, times, 2), SimError);
}

TEST_CASE("a lone particle diffuses at unit rate") {
  ModelSpec m;
  m.model = Model::dyson_finite;
  m.drift = DriftSpec{2.0, kInf, DriftSpec::Confinement::none};
  LabeledConfiguration init;
  init.positions.resize(1);
  init.positions << 0.0;

  std::vector<TrajectoryRecord> records;
  records.reserve(200);
  for (int k = 0; k < 200; ++k)
    records.push_back(evolve(m, init, StepPolicy{1e-3, 1e-9, 20}, 2.0, 0.5,
                             SamplerSeed{4300, static_cast<std::uint64_t>(k)}));

  const std::vector<double> times{0.5, 1.0, 2.0};
  const Curve msd = tagged_msd(records, 0, times);
  REQUIRE(msd.x.size() == 3);
  for (std::size_t j = 0; j < times.size(); ++j)
    CHECK(std::abs(msd.value[j] - times[j]) <= 4.0 * msd.se[j] + 5e-3);

  // the core reproduces the wrapper when fed the extracted positions
  std::vector<std::vector<double>> tagged;
  for (const auto& rec : records) {
    std::vector<double> tr{rec.snapshots[0].positions[0]};
    for (double t : times)
      for (const auto& s : rec.snapshots)
        if (s.time >= t) {
          tr.push_back(s.positions[0]);
          break;
        }
    tagged.push_back(std::move(tr));
  }
  const Curve core = tagged_msd_from_positions(tagged, times, records.size());
  for (std::size_t j = 0; j < times.size(); ++j)
    CHECK(core.value[j] == msd.value[j]);
}

TEST_CASE("the campbell residual assembles the documented formula") {
  IbpTestFunction f;
  f.a_center = 0.0;
  f.a_halfwidth = 1.0;
  CHECK(f.a(0.0) == 1.0);
  CHECK(f.a(1.0) == 0.0);
  CHECK(f.a(-2.0) == 0.0);
  CHECK(f.a_prime(0.0) == 0.0);

  const PointConfiguration c = fixed_config({-12.0, 12.0}, {0.3, 0.5});
  const std::vector<PointConfiguration> configs{c, c};
  const EstimateWithCI r = ibp_residual(configs, f, 10.0);
  const double expected = 2.0 * (1.0 / 0.2) * f.a(0.5) + f.a_prime(0.5) +
                          2.0 * (1.0 / -0.2) * f.a(0.3) + f.a_prime(0.3);
  CHECK(r.value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(r.se == 0.0);
  CHECK(r.n == 2);

  // cutoff ball poking outside the window is refused
  try {
    (void)ibp_residual(configs, f, 12.0);
    FAIL("expected window-mismatch");
  } catch (const SimError& e) {
    CHECK(e.code() == ErrorCode::window_mismatch);
  }
}

TEST_CASE("ergodicity gap vanishes exactly on matching constants") {
  const std::vector<double> series(400, 2.5);
  const std::vector<double> ensemble(100, 2.5);
  const ErgodicityGap g = ergodicity_gap(series, ensemble);
  CHECK(g.gap == 0.0);
  CHECK(g.time_mean == 2.5);
  CHECK(g.ensemble_mean == 2.5);
  CHECK(g.se == 0.0);
  CHECK(g.batches >= 20);
}

TEST_CASE("autocorrelation curve flags an alternating series") {
  std::vector<double> series(64);
  for (std::size_t i = 0; i < series.size(); ++i) series[i] = i % 2 ? 1.0 : -1.0;
  const Curve ac = autocorrelation_curve(series, 2);
  REQUIRE(ac.x.size() == 2);
  CHECK(ac.x[0] == 1.0);
  CHECK(ac.value[0] == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(ac.value[1] == doctest::Approx(1.0).epsilon(0.05));
  CHECK(ac.se[0] > 0.0);
}
