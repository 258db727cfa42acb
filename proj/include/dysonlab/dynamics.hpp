#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "dysonlab/common.hpp"
#include "dysonlab/rng.hpp"
#include "dysonlab/sampling.hpp"

namespace dysonlab {

// ordered particle positions carried through time; labels are array slots and
// the dynamics preserve strict ordering
struct LabeledConfiguration {
  Eigen::VectorXd positions;
  double time = 0.0;

  Eigen::Index size() const { return positions.size(); }
  // throws collision on coincident or unordered coordinates
  void validate() const;
};

struct DriftSpec {
  double beta = 2.0;
  double cutoff = kInf;  // pair interactions beyond this distance are dropped
  enum class Confinement { none, as_written } confinement = Confinement::none;

  void validate() const;
};

struct StepPolicy {
  double dt = 1e-3;
  double dt_min = 1e-9;
  int max_halvings = 20;

  void validate() const;
};

struct ChamberSpec {
  double radius = 1.0;
  int m = 2;

  void validate() const;
};

// logarithmic-derivative drift on particle i: (beta/2) sum_{j != i} 1/(x_i - x_j)
// over pairs closer than spec.cutoff, plus the optional as-written confinement
// term -(beta / (2 n)) / x_i
double pairwise_drift(Eigen::Index i, const LabeledConfiguration& c,
                      const DriftSpec& spec);

// drift for every particle; `exterior` contributes frozen neighbors within the
// cutoff.  Exact summation over the cutoff window, vectorized but untruncated.
Eigen::VectorXd drift_vector(const LabeledConfiguration& c, const DriftSpec& spec,
                             const PointConfiguration* exterior = nullptr);

// --- single steps --------------------------------------------------------
// Euler-Maruyama with ordering protection: a proposal that breaks strict
// ordering is retried with dt halved and the same Gaussian increment rescaled
// by sqrt(dt'/dt), at most policy.max_halvings times and never below
// policy.dt_min; exhaustion throws min-step-reached with the time attached.
// The *_with_noise forms are deterministic in `noise` and are the test hook.

LabeledConfiguration step_dyson_finite_with_noise(const LabeledConfiguration& c,
                                                  const DriftSpec& spec,
                                                  const StepPolicy& policy,
                                                  const Eigen::VectorXd& noise);
LabeledConfiguration step_dyson_finite(const LabeledConfiguration& c,
                                       const DriftSpec& spec,
                                       const StepPolicy& policy, CounterRng& rng);

// truncated interacting SDE against a frozen exterior configuration; the
// frozen points bracketing the interior are hard walls (a proposal crossing
// one is retried at a halved step, like any ordering violation), and the step
// throws boundary-escape when an interior particle exits interior_window
LabeledConfiguration step_truncated_isde_with_noise(const LabeledConfiguration& c,
                                                    const PointConfiguration& exterior,
                                                    Interval interior_window,
                                                    const DriftSpec& spec,
                                                    const StepPolicy& policy,
                                                    const Eigen::VectorXd& noise);
LabeledConfiguration step_truncated_isde(const LabeledConfiguration& c,
                                         const PointConfiguration& exterior,
                                         Interval interior_window,
                                         const DriftSpec& spec,
                                         const StepPolicy& policy, CounterRng& rng);

// Weyl-chamber diffusion with unit pair coupling and reflecting walls at
// +-radius, realized by folding proposals back into the chamber
LabeledConfiguration step_reflected_chamber_with_noise(const LabeledConfiguration& c,
                                                       const ChamberSpec& spec,
                                                       const StepPolicy& policy,
                                                       const Eigen::VectorXd& noise);
LabeledConfiguration step_reflected_chamber(const LabeledConfiguration& c,
                                            const ChamberSpec& spec,
                                            const StepPolicy& policy,
                                            CounterRng& rng);

// fold x into [-r, r] by repeated reflection
double fold_reflect(double x, double r);

// --- trajectories ----------------------------------------------------------

enum class Model { dyson_finite, truncated_isde, reflected_chamber };

const char* to_string(Model m);
Model model_from_string(const std::string& s);

struct ModelSpec {
  Model model = Model::dyson_finite;
  DriftSpec drift;
  ChamberSpec chamber;
  PointConfiguration exterior;       // truncated_isde only
  Interval interior_window{0.0, 0.0};  // truncated_isde only

  void validate() const;
};

struct Snapshot {
  double time = 0.0;
  Eigen::VectorXd positions;
  std::uint64_t rng_counter = 0;
};

enum class RunStatus { completed, escaped };

struct TrajectoryRecord {
  ModelSpec model;
  StepPolicy policy;
  SamplerSeed seed;
  double snapshot_every = 0.0;
  double horizon = 0.0;
  RunStatus status = RunStatus::completed;
  double escape_time = -1.0;
  std::vector<Snapshot> snapshots;  // cadence marks, snapshots[0] = initial
  Snapshot final;                   // terminal state, resume point
};

enum class EscapePolicy { propagate, flag_and_stop };

// integrates from `initial` for `horizon` time units, recording a snapshot
// whenever accepted time crosses a multiple of snapshot_every.  Total accepted
// time lands within one base dt of the horizon.  Stepper errors propagate with
// the failing time attached; boundary escapes either propagate or truncate the
// record with status = escaped.
TrajectoryRecord evolve(const ModelSpec& model, const LabeledConfiguration& initial,
                        const StepPolicy& policy, double horizon,
                        double snapshot_every, SamplerSeed seed,
                        EscapePolicy on_escape = EscapePolicy::propagate);

// same integrator, streaming snapshots to a callback instead of storing them
void evolve_observe(const ModelSpec& model, const LabeledConfiguration& initial,
                    const StepPolicy& policy, double horizon, double snapshot_every,
                    SamplerSeed seed,
                    const std::function<void(double, const Eigen::VectorXd&)>& on_snapshot,
                    EscapePolicy on_escape = EscapePolicy::propagate);

// continues a record for additional_horizon more time units, bit-exactly
// matching an uninterrupted run of the combined horizon
TrajectoryRecord resume(const TrajectoryRecord& rec, double additional_horizon,
                        EscapePolicy on_escape = EscapePolicy::propagate);

}  // namespace dysonlab
