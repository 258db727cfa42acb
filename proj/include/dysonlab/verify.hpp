#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dysonlab/config.hpp"
#include "dysonlab/sampling.hpp"

namespace dysonlab {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  VerifyLevel level = VerifyLevel::smoke;
  std::vector<CriterionResult> results;

  bool all_pass() const {
    for (const auto& r : results)
      if (!r.pass) return false;
    return !results.empty();
  }
};

// shared sample batches, built lazily and reused across criteria; every batch
// is pinned to a fixed seed so the whole suite is deterministic
class VerifyContext {
 public:
  explicit VerifyContext(VerifyLevel level) : level_(level) {}

  VerifyLevel level() const { return level_; }
  bool full() const { return level_ == VerifyLevel::full; }

  // optional progress stream for long batch builds
  void set_log(std::ostream* log) { log_ = log; }
  void note(const std::string& line);

  // unit-intensity sine process via the spectral sampler, medium window
  const std::vector<PointConfiguration>& sine_medium();
  // unit-intensity determinantal window sampler, small window
  const std::vector<PointConfiguration>& dpp_small();
  // discretization backing dpp_small(), for lattice-exact reference values
  const DiscretizedKernel& dpp_kernel();
  // wide-window spectral batch for counting statistics
  const std::vector<PointConfiguration>& sine_wide();
  // unit-intensity Poisson controls
  const std::vector<PointConfiguration>& poisson_medium();
  const std::vector<PointConfiguration>& poisson_wide();

  static KernelSpec unit_kernel() { return KernelSpec{3.141592653589793}; }

 private:
  VerifyLevel level_;
  std::ostream* log_ = nullptr;
  std::vector<PointConfiguration> sine_medium_, dpp_small_, sine_wide_;
  std::vector<PointConfiguration> poisson_medium_, poisson_wide_;
  DiscretizedKernel dpp_kernel_;
};

CriterionResult verify_kernel_determinant(VerifyContext& ctx);
CriterionResult verify_sampler_validity(VerifyContext& ctx);
CriterionResult verify_counting_variance(VerifyContext& ctx);
CriterionResult verify_rigidity(VerifyContext& ctx);
CriterionResult verify_chamber_stationarity(VerifyContext& ctx);
CriterionResult verify_irreducibility(VerifyContext& ctx);
CriterionResult verify_ergodicity(VerifyContext& ctx);
CriterionResult verify_tagged_msd(VerifyContext& ctx);
CriterionResult verify_ibp_residual(VerifyContext& ctx);
CriterionResult verify_drift_convergence(VerifyContext& ctx);
CriterionResult verify_determinism(VerifyContext& ctx);

// runs all criteria in order, streaming one pass/fail line each to `log`;
// a nonempty `only` restricts the run to criteria whose name contains it
VerifyReport run_verification(VerifyLevel level, std::ostream& log,
                              const std::string& only = {});

}  // namespace dysonlab
