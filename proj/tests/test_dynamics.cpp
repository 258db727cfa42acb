#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "dysonlab/dynamics.hpp"
#include "dysonlab/rng.hpp"
#include "dysonlab/sampling.hpp"

using namespace dysonlab;

namespace {

const DriftSpec kFree{2.0, kInf, DriftSpec::Confinement::none};

LabeledConfiguration config_of(std::initializer_list<double> xs) {
  LabeledConfiguration c;
  c.positions.resize(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) c.positions[i++] = x;
  return c;
}

}  // namespace

TEST_CASE("pairwise drift closed forms, cutoff, and confinement") {
  const LabeledConfiguration c = config_of({-1.0, 0.0, 2.0});
  CHECK(pairwise_drift(1, c, kFree) == 0.5);  // 1/1 + 1/(-2), beta = 2
  CHECK(pairwise_drift(0, c, kFree) == doctest::Approx(-4.0 / 3.0).epsilon(1e-15));

  const DriftSpec truncated{2.0, 1.5, DriftSpec::Confinement::none};
  CHECK(pairwise_drift(1, c, truncated) == 1.0);  // the pair at distance 2 drops

  const LabeledConfiguration lone = config_of({2.0});
  const DriftSpec confined{2.0, kInf, DriftSpec::Confinement::as_written};
  CHECK(pairwise_drift(0, lone, confined) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("vectorized drift agrees with per-particle sums, exterior included") {
  const PointConfiguration base = sample_poisson(2.0, {-6.0, 6.0}, SamplerSeed{31, 0});
  REQUIRE(base.size() >= 8);
  LabeledConfiguration c;
  c.positions = base.points.matrix();

  const DriftSpec spec{2.0, 2.5, DriftSpec::Confinement::none};
  const Eigen::VectorXd v = drift_vector(c, spec);
  for (Eigen::Index i = 0; i < c.size(); ++i)
    CHECK(v[i] == doctest::Approx(pairwise_drift(i, c, spec)).epsilon(1e-12));

  PointConfiguration ext;
  ext.window = Interval{-8.0, 8.0};
  ext.points.resize(3);
  ext.points << -7.0, 6.5, 7.25;
  const Eigen::VectorXd ve = drift_vector(c, spec, &ext);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    double frozen = 0.0;
    for (Eigen::Index j = 0; j < ext.size(); ++j) {
      const double d = c.positions[i] - ext.points[j];
      if (std::abs(d) < spec.cutoff) frozen += 1.0 / d;
    }
    CHECK(ve[i] == doctest::Approx(pairwise_drift(i, c, spec) + frozen).epsilon(1e-12));
  }
}

TEST_CASE("two deterministic particles follow the square-root gap law") {
  LabeledConfiguration c = config_of({-0.5, 0.5});
  const StepPolicy pol{1e-4, 1e-12, 8};
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  while (c.time < 0.5 - 1e-12) c = step_dyson_finite_with_noise(c, kFree, pol, zero);
  const double gap = c.positions[1] - c.positions[0];
  CHECK(gap == doctest::Approx(std::sqrt(1.0 + 4.0 * c.time)).epsilon(2e-4));
  CHECK(c.positions[0] + c.positions[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ordering rescue halves the step a deterministic number of times") {
  const LabeledConfiguration c = config_of({0.0, 0.1});
  const StepPolicy pol{0.01, 1e-9, 20};
  Eigen::VectorXd noise(2);
  noise << 2.0, -2.0;
  const LabeledConfiguration next = step_dyson_finite_with_noise(c, kFree, pol, noise);
  CHECK(next.time == 0.01 / 16.0);  // four halvings before ordering holds
  CHECK(next.positions[1] > next.positions[0]);

  const LabeledConfiguration again = step_dyson_finite_with_noise(c, kFree, pol, noise);
  CHECK((again.positions.array() == next.positions.array()).all());
  CHECK(again.time == next.time);
}

TEST_CASE("exhausted halvings raise min-step-reached with the time attached") {
  const LabeledConfiguration c = config_of({0.0, 0.1});
  Eigen::VectorXd noise(2);
  noise << 2.0, -2.0;
  try {
    (void)step_dyson_finite_with_noise(c, kFree, StepPolicy{0.01, 1e-9, 2}, noise);
    FAIL("expected min-step-reached");
  } catch (const SimError& e) {
    CHECK(e.code() == ErrorCode::min_step_reached);
  }
  // a dt_min floor just below dt blocks the first halving
  CHECK_THROWS_AS((void)step_dyson_finite_with_noise(
                      c, kFree, StepPolicy{0.01, 0.009, 20}, noise),
                  SimError);
}

TEST_CASE("coincident or unordered configurations are rejected") {
  CHECK_THROWS_AS(config_of({0.3, 0.3}).validate(), SimError);
  CHECK_THROWS_AS(config_of({0.5, -0.5}).validate(), SimError);
  CounterRng rng(SamplerSeed{32, 0});
  LabeledConfiguration bad = config_of({1.0, -1.0});
  CHECK_THROWS_AS((void)step_dyson_finite(bad, kFree, StepPolicy{1e-3, 1e-9, 8}, rng),
                  SimError);
}

TEST_CASE("the finite model insists on an infinite cutoff") {
  CounterRng rng(SamplerSeed{33, 0});
  LabeledConfiguration c = config_of({-1.0, 1.0});
  const DriftSpec truncated{2.0, 3.0, DriftSpec::Confinement::none};
  CHECK_THROWS_AS(
      (void)step_dyson_finite(c, truncated, StepPolicy{1e-3, 1e-9, 8}, rng), SimError);
}

TEST_CASE("frozen-wall steps flag boundary escapes") {
  PointConfiguration ext;
  ext.window = Interval{-4.0, 4.0};
  ext.points.resize(2);
  ext.points << -3.5, 3.5;
  const Interval iw{-3.0, 3.0};
  const DriftSpec spec{2.0, 2.0, DriftSpec::Confinement::none};
  const StepPolicy pol{0.01, 1e-9, 4};

  LabeledConfiguration c = config_of({2.9});
  Eigen::VectorXd kick(1);
  kick << 4.0;
  try {
    (void)step_truncated_isde_with_noise(c, ext, iw, spec, pol, kick);
    FAIL("expected boundary-escape");
  } catch (const SimError& e) {
    CHECK(e.code() == ErrorCode::boundary_escape);
    CHECK(e.when() > 0.0);
  }

  // a gentle step stays inside and advances time
  kick << 0.1;
  const LabeledConfiguration ok = step_truncated_isde_with_noise(c, ext, iw, spec, pol, kick);
  CHECK(iw.contains(ok.positions[0]));
  CHECK(ok.time == 0.01);
}

TEST_CASE("reflection folding is an involution into the box") {
  CHECK(fold_reflect(0.7, 1.0) == 0.7);
  CHECK(fold_reflect(1.3, 1.0) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(fold_reflect(-1.3, 1.0) == doctest::Approx(-0.7).epsilon(1e-15));
  CHECK(fold_reflect(3.9, 1.0) == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(fold_reflect(4.3, 1.0) == doctest::Approx(0.3).epsilon(1e-12));  // period 4r
  for (double x : {-7.3, -2.4, 0.1, 5.9, 11.7})
    CHECK(std::abs(fold_reflect(x, 1.0)) <= 1.0);
}

TEST_CASE("chamber steps stay inside the box and strictly ordered") {
  const ChamberSpec spec{1.0, 3};
  const StepPolicy pol{1e-3, 1e-12, 30};
  LabeledConfiguration c = config_of({-0.5, 0.0, 0.5});
  CounterRng rng(SamplerSeed{13, 0});
  bool inside = true, ordered = true;
  for (int s = 0; s < 20000; ++s) {
    c = step_reflected_chamber(c, spec, pol, rng);
    inside &= std::abs(c.positions[0]) <= 1.0 && std::abs(c.positions[2]) <= 1.0;
    ordered &= c.positions[0] < c.positions[1] && c.positions[1] < c.positions[2];
  }
  CHECK(inside);
  CHECK(ordered);
  // halved rescue steps advance less than dt, so time trails steps * dt
  CHECK(c.time <= 20.0 + 1e-9);
  CHECK(c.time > 15.0);

  LabeledConfiguration wrong = config_of({-0.5, 0.5});
  CHECK_THROWS_AS((void)step_reflected_chamber(wrong, spec, pol, rng), SimError);
}

TEST_CASE("evolve records the initial state, cadence marks, and a final state") {
  ModelSpec m;
  m.model = Model::dyson_finite;
  m.drift = kFree;
  LabeledConfiguration init;
  init.positions = Eigen::VectorXd::LinSpaced(4, -1.0, 1.0);

  const TrajectoryRecord rec =
      evolve(m, init, StepPolicy{1e-3, 1e-9, 20}, 1.0, 0.25, SamplerSeed{14, 0});
  REQUIRE(rec.snapshots.size() == 5);
  CHECK(rec.snapshots[0].time == 0.0);
  CHECK(rec.snapshots[0].rng_counter == 0);
  for (std::size_t i = 1; i < rec.snapshots.size(); ++i) {
    CHECK(rec.snapshots[i].time >= 0.25 * static_cast<double>(i) - 1e-9);
    CHECK(rec.snapshots[i].time < 0.25 * static_cast<double>(i) + 2e-3);
    CHECK(rec.snapshots[i].rng_counter > rec.snapshots[i - 1].rng_counter);
  }
  CHECK(rec.final.time >= 1.0);
  CHECK(rec.status == RunStatus::completed);
  CHECK(rec.horizon == 1.0);
}

TEST_CASE("resume continues bit-exactly and a zero extension is a no-op") {
  ModelSpec m;
  m.model = Model::dyson_finite;
  m.drift = kFree;
  LabeledConfiguration init;
  init.positions = Eigen::VectorXd::LinSpaced(4, -1.0, 1.0);
  const StepPolicy pol{1e-3, 1e-9, 20};

  const TrajectoryRecord whole = evolve(m, init, pol, 1.0, 0.25, SamplerSeed{15, 2});
  const TrajectoryRecord head = evolve(m, init, pol, 0.4, 0.25, SamplerSeed{15, 2});
  const TrajectoryRecord glued = resume(head, 0.6);

  REQUIRE(glued.snapshots.size() == whole.snapshots.size());
  for (std::size_t i = 0; i < whole.snapshots.size(); ++i) {
    CHECK(glued.snapshots[i].time == whole.snapshots[i].time);
    CHECK(glued.snapshots[i].rng_counter == whole.snapshots[i].rng_counter);
    CHECK((glued.snapshots[i].positions.array() == whole.snapshots[i].positions.array())
              .all());
  }
  CHECK(glued.final.time == whole.final.time);
  CHECK((glued.final.positions.array() == whole.final.positions.array()).all());
  CHECK(glued.horizon == whole.horizon);

  const TrajectoryRecord frozen = resume(whole, 0.0);
  CHECK(frozen.snapshots.size() == whole.snapshots.size());
  CHECK(frozen.final.time == whole.final.time);
  CHECK(frozen.final.rng_counter == whole.final.rng_counter);
}

TEST_CASE("escape policies either propagate or truncate the record") {
  ModelSpec m;
  m.model = Model::truncated_isde;
  m.drift = DriftSpec{2.0, 5.0, DriftSpec::Confinement::none};
  m.exterior.window = Interval{-2.0, 2.0};
  m.exterior.points.resize(2);
  m.exterior.points << -1.0, 1.0;
  m.interior_window = Interval{-0.2, 0.2};
  LabeledConfiguration init;
  init.positions.resize(1);
  init.positions << 0.0;
  const StepPolicy pol{1e-3, 1e-12, 20};

  CHECK_THROWS_AS(
      (void)evolve(m, init, pol, 1.0, 0.1, SamplerSeed{16, 0}, EscapePolicy::propagate),
      SimError);

  const TrajectoryRecord rec =
      evolve(m, init, pol, 1.0, 0.1, SamplerSeed{16, 0}, EscapePolicy::flag_and_stop);
  CHECK(rec.status == RunStatus::escaped);
  CHECK(rec.escape_time > 0.0);
  CHECK(rec.final.time < 1.0);
}
