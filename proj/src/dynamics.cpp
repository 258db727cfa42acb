#include "dysonlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dysonlab {

void LabeledConfiguration::validate() const {
  for (Eigen::Index i = 0; i < positions.size(); ++i)
    require(std::isfinite(positions[i]), ErrorCode::invalid_argument,
            "positions must be finite");
  for (Eigen::Index i = 1; i < positions.size(); ++i)
    require(positions[i - 1] < positions[i], ErrorCode::collision,
            "coordinates must be strictly increasing");
}

void DriftSpec::validate() const {
  require(std::isfinite(beta) && beta > 0.0, ErrorCode::invalid_argument,
          "beta must be finite and positive");
  require(cutoff > 0.0, ErrorCode::invalid_argument, "cutoff must be positive");
}

void StepPolicy::validate() const {
  require(std::isfinite(dt) && dt > 0.0, ErrorCode::invalid_argument,
          "dt must be finite and positive");
  require(std::isfinite(dt_min) && dt_min > 0.0 && dt_min <= dt,
          ErrorCode::invalid_argument, "dt_min must satisfy 0 < dt_min <= dt");
  require(max_halvings >= 0, ErrorCode::invalid_argument,
          "max_halvings must be nonnegative");
}

void ChamberSpec::validate() const {
  require(std::isfinite(radius) && radius > 0.0, ErrorCode::invalid_argument,
          "chamber radius must be finite and positive");
  require(m >= 1, ErrorCode::invalid_argument, "chamber dimension must be >= 1");
}

namespace {

// sum of 1/(y - x_j) over the slice [lo, hi) of sorted x, excluding index skip
inline double inverse_gap_sum(const Eigen::VectorXd& x, Eigen::Index lo,
                              Eigen::Index hi, Eigen::Index skip, double y) {
  double s = 0.0;
  if (skip >= lo && skip < hi) {
    if (skip > lo) s += (y - x.segment(lo, skip - lo).array()).inverse().sum();
    if (hi > skip + 1)
      s += (y - x.segment(skip + 1, hi - skip - 1).array()).inverse().sum();
  } else if (hi > lo) {
    s += (y - x.segment(lo, hi - lo).array()).inverse().sum();
  }
  return s;
}

inline bool strictly_increasing(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (!(v[i - 1] < v[i])) return false;  // NaN fails here too
  return true;
}

}  // namespace

double pairwise_drift(Eigen::Index i, const LabeledConfiguration& c,
                      const DriftSpec& spec) {
  spec.validate();
  const Eigen::Index n = c.size();
  require(i >= 0 && i < n, ErrorCode::invalid_argument, "particle index out of range");

  const Eigen::VectorXd& x = c.positions;
  const double xi = x[i];
  double s = 0.0;
  if (std::isinf(spec.cutoff)) {
    s = inverse_gap_sum(x, 0, n, i, xi);
  } else {
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i && std::abs(xi - x[j]) < spec.cutoff) s += 1.0 / (xi - x[j]);
  }
  double b = 0.5 * spec.beta * s;
  if (spec.confinement == DriftSpec::Confinement::as_written)
    b -= 0.5 * spec.beta / (static_cast<double>(n) * xi);
  return b;
}

Eigen::VectorXd drift_vector(const LabeledConfiguration& c, const DriftSpec& spec,
                             const PointConfiguration* exterior) {
  const Eigen::Index n = c.size();
  const Eigen::VectorXd& x = c.positions;
  Eigen::VectorXd b(n);

  if (std::isinf(spec.cutoff)) {
    for (Eigen::Index i = 0; i < n; ++i) b[i] = inverse_gap_sum(x, 0, n, i, x[i]);
  } else {
    // sorted positions: cutoff windows advance monotonically with i
    Eigen::Index lo = 0, hi = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xi = x[i];
      while (lo < n && x[lo] <= xi - spec.cutoff) ++lo;
      if (hi < i) hi = i;
      while (hi < n && x[hi] < xi + spec.cutoff) ++hi;
      b[i] = inverse_gap_sum(x, lo, hi, i, xi);
    }
  }

  if (exterior && exterior->size() > 0) {
    const Eigen::ArrayXd& e = exterior->points;
    const Eigen::Index ne = e.size();
    const double cut = spec.cutoff;
    Eigen::Index lo = 0, hi = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xi = x[i];
      if (std::isinf(cut)) {
        lo = 0;
        hi = ne;
      } else {
        while (lo < ne && e[lo] <= xi - cut) ++lo;
        if (hi < lo) hi = lo;
        while (hi < ne && e[hi] < xi + cut) ++hi;
      }
      if (hi > lo) b[i] += (xi - e.segment(lo, hi - lo)).inverse().sum();
    }
  }

  b *= 0.5 * spec.beta;
  if (spec.confinement == DriftSpec::Confinement::as_written)
    b -= (0.5 * spec.beta / static_cast<double>(n)) * x.cwiseInverse();
  return b;
}

namespace {

// one Euler-Maruyama step with ordering protection; `post` maps the raw
// proposal (e.g. reflection folding) before the checks, and `accept` decides
// whether a proposal keeps the required ordering
template <class Post, class Accept>
LabeledConfiguration em_step(const LabeledConfiguration& c, const StepPolicy& policy,
                             const Eigen::VectorXd& drift, const Eigen::VectorXd& noise,
                             Post&& post, Accept&& accept) {
  double dt = policy.dt;
  for (int h = 0; h <= policy.max_halvings && dt >= policy.dt_min; ++h, dt *= 0.5) {
    Eigen::VectorXd y = c.positions + drift * dt + noise * std::sqrt(dt);
    post(y);
    if (accept(y)) {
      LabeledConfiguration next;
      next.positions = std::move(y);
      next.time = c.time + dt;
      return next;
    }
  }
  fail(ErrorCode::min_step_reached,
       "ordering could not be restored above dt_min", c.time);
}

Eigen::VectorXd draw_noise(Eigen::Index n, CounterRng& rng) {
  Eigen::VectorXd xi(n);
  rng.fill_normal(xi);
  return xi;
}

}  // namespace

LabeledConfiguration step_dyson_finite_with_noise(const LabeledConfiguration& c,
                                                  const DriftSpec& spec,
                                                  const StepPolicy& policy,
                                                  const Eigen::VectorXd& noise) {
  c.validate();
  spec.validate();
  policy.validate();
  require(std::isinf(spec.cutoff), ErrorCode::invalid_argument,
          "finite-system drift sums all pairs: cutoff must be infinite");
  require(noise.size() == c.size(), ErrorCode::invalid_argument,
          "noise dimension mismatch");
  const Eigen::VectorXd b = drift_vector(c, spec);
  return em_step(c, policy, b, noise, [](Eigen::VectorXd&) {},
                 [](const Eigen::VectorXd& y) { return strictly_increasing(y); });
}

LabeledConfiguration step_dyson_finite(const LabeledConfiguration& c,
                                       const DriftSpec& spec,
                                       const StepPolicy& policy, CounterRng& rng) {
  return step_dyson_finite_with_noise(c, spec, policy, draw_noise(c.size(), rng));
}

LabeledConfiguration step_truncated_isde_with_noise(const LabeledConfiguration& c,
                                                    const PointConfiguration& exterior,
                                                    Interval interior_window,
                                                    const DriftSpec& spec,
                                                    const StepPolicy& policy,
                                                    const Eigen::VectorXd& noise) {
  c.validate();
  spec.validate();
  policy.validate();
  require(std::isfinite(spec.cutoff), ErrorCode::invalid_argument,
          "truncated drift requires a finite cutoff");
  require(spec.confinement == DriftSpec::Confinement::none, ErrorCode::invalid_argument,
          "truncated dynamics carry no confinement term");
  require(noise.size() == c.size(), ErrorCode::invalid_argument,
          "noise dimension mismatch");

  // The frozen points bracketing the interior act as hard walls: in the
  // continuum the 1/gap repulsion makes crossing one a null event, so a
  // proposal that jumps past a wall is the same ordering violation as an
  // interior collision and is retried at a halved step.
  double wall_lo = -std::numeric_limits<double>::infinity();
  double wall_hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < exterior.size(); ++j) {
    const double e = exterior.points[j];
    if (e <= interior_window.a && e > wall_lo) wall_lo = e;
    if (e >= interior_window.b && e < wall_hi) wall_hi = e;
  }

  const Eigen::VectorXd b = drift_vector(c, spec, &exterior);
  LabeledConfiguration next = em_step(
      c, policy, b, noise, [](Eigen::VectorXd&) {},
      [wall_lo, wall_hi](const Eigen::VectorXd& y) {
        return strictly_increasing(y) &&
               (y.size() == 0 || (y[0] > wall_lo && y[y.size() - 1] < wall_hi));
      });
  if (next.size() > 0 &&
      (next.positions[0] < interior_window.a ||
       next.positions[next.size() - 1] > interior_window.b))
    fail(ErrorCode::boundary_escape, "interior particle left the interior window",
         next.time);
  return next;
}

LabeledConfiguration step_truncated_isde(const LabeledConfiguration& c,
                                         const PointConfiguration& exterior,
                                         Interval interior_window,
                                         const DriftSpec& spec,
                                         const StepPolicy& policy, CounterRng& rng) {
  return step_truncated_isde_with_noise(c, exterior, interior_window, spec, policy,
                                        draw_noise(c.size(), rng));
}

double fold_reflect(double x, double r) {
  const double period = 4.0 * r;
  double y = std::fmod(x + r, period);
  if (y < 0.0) y += period;
  if (y > 2.0 * r) y = period - y;
  return y - r;
}

LabeledConfiguration step_reflected_chamber_with_noise(const LabeledConfiguration& c,
                                                       const ChamberSpec& spec,
                                                       const StepPolicy& policy,
                                                       const Eigen::VectorXd& noise) {
  c.validate();
  spec.validate();
  policy.validate();
  require(c.size() == spec.m, ErrorCode::invalid_argument,
          "configuration dimension must equal chamber dimension");
  require(noise.size() == c.size(), ErrorCode::invalid_argument,
          "noise dimension mismatch");
  for (Eigen::Index i = 0; i < c.size(); ++i)
    require(std::abs(c.positions[i]) <= spec.radius, ErrorCode::invalid_argument,
            "positions must lie inside the chamber box");

  // unit pair coupling in the chamber generator
  const Eigen::Index m = c.size();
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i)
    b[i] = inverse_gap_sum(c.positions, 0, m, i, c.positions[i]);

  const double r = spec.radius;
  return em_step(
      c, policy, b, noise,
      [r](Eigen::VectorXd& y) {
        for (Eigen::Index i = 0; i < y.size(); ++i)
          y[i] = std::isfinite(y[i]) ? fold_reflect(y[i], r) : y[i];
      },
      [](const Eigen::VectorXd& y) { return strictly_increasing(y); });
}

LabeledConfiguration step_reflected_chamber(const LabeledConfiguration& c,
                                            const ChamberSpec& spec,
                                            const StepPolicy& policy,
                                            CounterRng& rng) {
  return step_reflected_chamber_with_noise(c, spec, policy, draw_noise(c.size(), rng));
}

const char* to_string(Model m) {
  switch (m) {
    case Model::dyson_finite: return "dyson-finite";
    case Model::truncated_isde: return "truncated-isde";
    case Model::reflected_chamber: return "reflected-chamber";
  }
  return "unknown";
}

Model model_from_string(const std::string& s) {
  if (s == "dyson-finite") return Model::dyson_finite;
  if (s == "truncated-isde") return Model::truncated_isde;
  if (s == "reflected-chamber") return Model::reflected_chamber;
  fail(ErrorCode::invalid_argument, "unknown model: " + s);
}

void ModelSpec::validate() const {
  switch (model) {
    case Model::dyson_finite:
      drift.validate();
      require(std::isinf(drift.cutoff), ErrorCode::invalid_argument,
              "finite model requires an infinite cutoff");
      break;
    case Model::truncated_isde: {
      drift.validate();
      require(std::isfinite(drift.cutoff), ErrorCode::invalid_argument,
              "truncated model requires a finite cutoff");
      require(interior_window.valid(), ErrorCode::invalid_argument,
              "interior window must satisfy a < b");
      exterior.validate();
      require(exterior.window.contains(interior_window), ErrorCode::window_mismatch,
              "exterior window must contain the interior window");
      for (Eigen::Index i = 0; i < exterior.size(); ++i)
        require(!(interior_window.a < exterior.points[i] &&
                  exterior.points[i] < interior_window.b),
                ErrorCode::window_mismatch,
                "exterior points must lie outside the interior window");
      break;
    }
    case Model::reflected_chamber:
      chamber.validate();
      break;
  }
}

namespace {

struct StepperFn {
  const ModelSpec& model;
  LabeledConfiguration operator()(const LabeledConfiguration& c, const StepPolicy& p,
                                  CounterRng& rng) const {
    switch (model.model) {
      case Model::dyson_finite:
        return step_dyson_finite(c, model.drift, p, rng);
      case Model::truncated_isde:
        return step_truncated_isde(c, model.exterior, model.interior_window,
                                   model.drift, p, rng);
      case Model::reflected_chamber:
        return step_reflected_chamber(c, model.chamber, p, rng);
    }
    fail(ErrorCode::invalid_argument, "unknown model");
  }
};

// shared integrator; target is the absolute end time
template <class Sink>
void evolve_core(const ModelSpec& model, LabeledConfiguration state,
                 std::uint64_t counter0, const StepPolicy& policy, double target,
                 double snapshot_every, SamplerSeed seed, EscapePolicy on_escape,
                 Sink&& sink, Snapshot& final_out, RunStatus& status_out,
                 double& escape_time_out) {
  model.validate();
  policy.validate();
  require(std::isfinite(snapshot_every) && snapshot_every > 0.0,
          ErrorCode::invalid_argument, "snapshot_every must be positive");
  // a target at or before the current time means "take no steps": a resumed
  // record whose final time already overshot its horizon is a valid no-op

  CounterRng rng(seed);
  rng.set_counter(counter0);
  StepperFn step{model};

  status_out = RunStatus::completed;
  escape_time_out = -1.0;
  auto mark = [&](double t) {
    return static_cast<long long>(std::floor(t / snapshot_every));
  };
  long long k = mark(state.time);

  while (state.time < target) {
    LabeledConfiguration next;
    try {
      next = step(state, policy, rng);
    } catch (const SimError& e) {
      if (e.code() == ErrorCode::boundary_escape &&
          on_escape == EscapePolicy::flag_and_stop) {
        status_out = RunStatus::escaped;
        escape_time_out = e.when();
        break;
      }
      throw;
    }
    state = std::move(next);
    const long long k2 = mark(state.time);
    if (k2 > k) {
      k = k2;
      sink(state.time, state.positions, rng.counter());
    }
  }

  final_out.time = state.time;
  final_out.positions = state.positions;
  final_out.rng_counter = rng.counter();
}

}  // namespace

TrajectoryRecord evolve(const ModelSpec& model, const LabeledConfiguration& initial,
                        const StepPolicy& policy, double horizon,
                        double snapshot_every, SamplerSeed seed,
                        EscapePolicy on_escape) {
  initial.validate();
  require(std::isfinite(horizon) && horizon >= 0.0, ErrorCode::invalid_argument,
          "horizon must be finite and nonnegative");

  TrajectoryRecord rec;
  rec.model = model;
  rec.policy = policy;
  rec.seed = seed;
  rec.snapshot_every = snapshot_every;
  rec.horizon = initial.time + horizon;
  rec.snapshots.push_back({initial.time, initial.positions, 0});

  evolve_core(
      model, initial, 0, policy, rec.horizon, snapshot_every, seed, on_escape,
      [&](double t, const Eigen::VectorXd& x, std::uint64_t ctr) {
        rec.snapshots.push_back({t, x, ctr});
      },
      rec.final, rec.status, rec.escape_time);
  return rec;
}

void evolve_observe(const ModelSpec& model, const LabeledConfiguration& initial,
                    const StepPolicy& policy, double horizon, double snapshot_every,
                    SamplerSeed seed,
                    const std::function<void(double, const Eigen::VectorXd&)>& on_snapshot,
                    EscapePolicy on_escape) {
  initial.validate();
  require(std::isfinite(horizon) && horizon >= 0.0, ErrorCode::invalid_argument,
          "horizon must be finite and nonnegative");
  Snapshot fin;
  RunStatus status;
  double esc;
  on_snapshot(initial.time, initial.positions);
  evolve_core(
      model, initial, 0, policy, initial.time + horizon, snapshot_every, seed,
      on_escape,
      [&](double t, const Eigen::VectorXd& x, std::uint64_t) { on_snapshot(t, x); },
      fin, status, esc);
  on_snapshot(fin.time, fin.positions);
}

TrajectoryRecord resume(const TrajectoryRecord& rec, double additional_horizon,
                        EscapePolicy on_escape) {
  require(std::isfinite(additional_horizon) && additional_horizon >= 0.0,
          ErrorCode::invalid_argument, "additional horizon must be nonnegative");
  require(rec.status == RunStatus::completed, ErrorCode::invalid_argument,
          "cannot resume an escaped trajectory");

  TrajectoryRecord out = rec;
  out.horizon = rec.horizon + additional_horizon;
  LabeledConfiguration state;
  state.positions = rec.final.positions;
  state.time = rec.final.time;

  evolve_core(
      out.model, state, rec.final.rng_counter, out.policy, out.horizon,
      out.snapshot_every, out.seed, on_escape,
      [&](double t, const Eigen::VectorXd& x, std::uint64_t ctr) {
        out.snapshots.push_back({t, x, ctr});
      },
      out.final, out.status, out.escape_time);
  return out;
}

}  // namespace dysonlab
