#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dysonlab/common.hpp"

namespace dysonlab {

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // unbiased
  double m2 = 0.0;   // central second moment (biased)
  double m4 = 0.0;   // central fourth moment
  std::size_t n = 0;

  double se_mean() const;
  // standard error of the sample variance, sqrt((m4 - m2^2)/n)
  double se_var() const;
};

MeanVar summarize(std::span<const double> xs);

// mean computed as xs[0] + mean(xs[i] - xs[0]); a constant series returns
// exactly xs[0], which keeps identities on constants exact in fp
double anchored_mean(std::span<const double> xs);

// --- goodness of fit ---------------------------------------------------

// sup |F_n - cdf| over a sample (sorted internally)
double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> xs, std::vector<double> ys);

// survival function of the Kolmogorov distribution
double kolmogorov_sf(double x);
// one-sample p-value with Stephens' small-n correction; n may be an
// effective (non-integer) sample count
double ks_pvalue(double d, double n_eff);
double ks_two_sample_pvalue(double d, double n_eff_x, double n_eff_y);

// regularized incomplete gamma functions P(a, x), Q(a, x)
double gamma_p(double a, double x);
double gamma_q(double a, double x);
// chi-square survival function with dof degrees of freedom
double chi2_sf(double x, double dof);

double normal_cdf(double x);

// semicircle law on [-2, 2]: density sqrt(4 - u^2) / (2 pi)
double semicircle_cdf(double u);

// --- correlated time series --------------------------------------------

struct BatchMeans {
  double mean = 0.0;
  double se = 0.0;
  std::size_t batch_len = 0;
  std::size_t batches = 0;
  double lag1 = 0.0;  // lag-one correlation of the final batch means
};

// error bars for a stationary correlated series: batch length doubles until
// the batch means decorrelate; signals insufficient-mixing when fewer than
// min_batches decorrelated batches remain
BatchMeans batch_means(std::span<const double> xs, std::size_t min_batches = 20,
                       double lag1_threshold = 0.2);

// normalized autocovariances r_1..r_max_lag
std::vector<double> autocorrelation(std::span<const double> xs, std::size_t max_lag);
// Bartlett standard error of r_k given r_1..r_{k-1}
double bartlett_se(std::span<const double> r, std::size_t k, std::size_t n);
// integrated autocorrelation time 1/2 + sum r_k with a Sokal window;
// 0.5 for white noise
double integrated_autocorr_time(std::span<const double> xs);

// --- least squares ------------------------------------------------------

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace dysonlab
