#pragma once

#include <span>
#include <vector>

#include "dysonlab/common.hpp"
#include "dysonlab/dynamics.hpp"
#include "dysonlab/sampling.hpp"
#include "dysonlab/stats.hpp"

namespace dysonlab {

enum class CiMethod { iid, batch };

struct EstimateWithCI {
  double value = 0.0;
  double se = 0.0;
  std::size_t n = 0;
  CiMethod method = CiMethod::iid;
};

struct Curve {
  std::vector<double> x;
  std::vector<double> value;
  std::vector<double> se;
  std::size_t n = 0;
  CiMethod method = CiMethod::iid;
};

// --- scalar observables on a configuration -------------------------------

enum class ObservableKind {
  count_in_window,
  linear_statistic,   // sum of a smooth cosine bump over the window
  indicator_of_gap,   // 1 when the window holds no point
  polynomial_local,   // sum of poly(x - center) over points in the window
};

const char* to_string(ObservableKind k);
ObservableKind observable_from_string(const std::string& s);

struct ObservableSpec {
  ObservableKind kind = ObservableKind::count_in_window;
  Interval window{-1.0, 1.0};
  std::vector<double> coeffs;  // polynomial_local only

  void validate() const;
};

double eval_observable(const ObservableSpec& spec, std::span<const double> points);

// --- ensemble estimators ---------------------------------------------------
// all configurations in a batch must share one window

// per-bin one-point intensity across the window
Curve estimate_one_point(std::span<const PointConfiguration> configs, int bins);

// edge-corrected two-point function on a separation grid: pair counting with
// the left point restricted to the window shrunk by the largest separation,
// bins of half-width h (grid must be spaced at least 2h apart)
Curve estimate_two_point(std::span<const PointConfiguration> configs,
                         std::span<const double> separations, double h);

// variance of the count in centered intervals [c-R, c+R]
Curve counting_variance_curve(std::span<const PointConfiguration> configs,
                              std::span<const double> radii);

struct RigidityResult {
  std::vector<double> taper_widths;
  std::vector<double> unexplained;  // residual variance fraction of the count
  double var_count = 0.0;
  std::size_t n = 0;
};

// regression of the interior count on tapered exterior statistics; the
// unexplained fraction 1 - r^2 measures how far the exterior determines the
// interior count
RigidityResult rigidity_statistic(std::span<const PointConfiguration> configs,
                                  Interval interior,
                                  std::span<const double> taper_widths);

// --- tagged particle ---------------------------------------------------

// mean squared displacement of one tagged label across trajectory records at
// the given times; escaped records are dropped, and more than 20% exclusions
// signal too-many-escapes
Curve tagged_msd(std::span<const TrajectoryRecord> records, Eigen::Index tag,
                 std::span<const double> times);

// core on pre-extracted tagged positions: tagged[k][j] = position of the tag
// in trajectory k at times[j]; n_attempted counts exclusions for the escape gate
Curve tagged_msd_from_positions(const std::vector<std::vector<double>>& tagged,
                                std::span<const double> times,
                                std::size_t n_attempted);

// --- integration-by-parts residual -------------------------------------

struct IbpTestFunction {
  double a_center = 0.0;  // smooth bump a, support [center - hw, center + hw]
  double a_halfwidth = 1.0;
  enum class BKind { constant, tanh_bump } b_kind = BKind::constant;
  double g_center = 0.0;  // bump g inside b = tanh(sum g), tanh_bump only
  double g_halfwidth = 1.0;

  double a(double s) const;
  double a_prime(double s) const;
  double g(double s) const;
};

// reduced-Campbell residual  E sum_i [ d_R(s_i) a(s_i) + a'(s_i) ] b(cfg - s_i)
// with d_R(s) = 2 sum_{|s - s_j| < R} 1/(s - s_j); vanishes on the sine
// process.  Requires the cutoff ball around supp(a) inside the window.
EstimateWithCI ibp_residual(std::span<const PointConfiguration> configs,
                            const IbpTestFunction& f, double cutoff);

// --- time averages ------------------------------------------------------

struct ErgodicityGap {
  double gap = 0.0;       // time average minus ensemble average
  double se = 0.0;        // combined standard error
  double time_mean = 0.0;
  double time_se = 0.0;
  double ensemble_mean = 0.0;
  double ensemble_se = 0.0;
  std::size_t batches = 0;
  std::size_t batch_len = 0;
};

// exact zero (in fp) when both inputs are the same constant
ErgodicityGap ergodicity_gap(std::span<const double> series,
                             std::span<const double> ensemble,
                             std::size_t min_batches = 20);

// normalized autocorrelation of a series with Bartlett error bars
Curve autocorrelation_curve(std::span<const double> series, std::size_t max_lag);

}  // namespace dysonlab
