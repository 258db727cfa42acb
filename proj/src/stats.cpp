#include "dysonlab/stats.hpp"

#include <algorithm>
#include <cmath>

namespace dysonlab {

double MeanVar::se_mean() const { return n > 1 ? std::sqrt(var / n) : 0.0; }

double MeanVar::se_var() const {
  if (n < 2) return 0.0;
  const double v = m4 - m2 * m2;
  return v > 0.0 ? std::sqrt(v / n) : 0.0;
}

MeanVar summarize(std::span<const double> xs) {
  MeanVar s;
  s.n = xs.size();
  if (s.n == 0) return s;
  s.mean = anchored_mean(xs);
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - s.mean;
    const double d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  s.m2 = m2 / s.n;
  s.m4 = m4 / s.n;
  s.var = s.n > 1 ? m2 / (s.n - 1) : 0.0;
  return s;
}

double anchored_mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  const double x0 = xs[0];
  double acc = 0.0;
  for (double x : xs) acc += x - x0;
  return x0 + acc / xs.size();
}

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  require(!xs.empty(), ErrorCode::invalid_argument, "ks needs a nonempty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::abs(f - i / n));
    d = std::max(d, std::abs((i + 1) / n - f));
  }
  return d;
}

double ks_two_sample(std::vector<double> xs, std::vector<double> ys) {
  require(!xs.empty() && !ys.empty(), ErrorCode::invalid_argument,
          "ks needs nonempty samples");
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double nx = static_cast<double>(xs.size());
  const double ny = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double t = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] <= t) ++i;
    while (j < ys.size() && ys[j] <= t) ++j;
    d = std::max(d, std::abs(i / nx - j / ny));
  }
  return d;
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * x * x);
    s += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

double ks_pvalue(double d, double n_eff) {
  require(n_eff > 0.0, ErrorCode::invalid_argument, "effective n must be positive");
  const double rn = std::sqrt(n_eff);
  return kolmogorov_sf((rn + 0.12 + 0.11 / rn) * d);
}

double ks_two_sample_pvalue(double d, double n_eff_x, double n_eff_y) {
  const double ne = n_eff_x * n_eff_y / (n_eff_x + n_eff_y);
  return ks_pvalue(d, ne);
}

namespace {

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  require(a > 0.0 && x >= 0.0, ErrorCode::invalid_argument, "gamma_p domain");
  if (x == 0.0) return 0.0;
  return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  require(a > 0.0 && x >= 0.0, ErrorCode::invalid_argument, "gamma_q domain");
  if (x == 0.0) return 1.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_sf(double x, double dof) { return gamma_q(0.5 * dof, 0.5 * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730951); }

double semicircle_cdf(double u) {
  if (u <= -2.0) return 0.0;
  if (u >= 2.0) return 1.0;
  return 0.5 + (u * std::sqrt(4.0 - u * u) / 2.0 + 2.0 * std::asin(0.5 * u)) /
                   (2.0 * 3.141592653589793);
}

BatchMeans batch_means(std::span<const double> xs, std::size_t min_batches,
                       double lag1_threshold) {
  require(min_batches >= 4, ErrorCode::invalid_argument, "need at least 4 batches");
  require(xs.size() >= 2 * min_batches, ErrorCode::insufficient_mixing,
          "series too short for batch means");

  std::vector<double> means(xs.begin(), xs.end());
  std::size_t batch_len = 1;
  BatchMeans out;

  for (;;) {
    const std::size_t b = means.size();
    MeanVar mv = summarize(means);
    double lag1 = 0.0;
    double denom = 0.0, num = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
      const double d = means[i] - mv.mean;
      denom += d * d;
      if (i + 1 < b) num += d * (means[i + 1] - mv.mean);
    }
    lag1 = denom > 0.0 ? num / denom : 0.0;

    out.mean = mv.mean;
    out.se = mv.se_mean();
    out.batch_len = batch_len;
    out.batches = b;
    out.lag1 = lag1;

    if (lag1 <= lag1_threshold) return out;
    if (b / 2 < min_batches)
      fail(ErrorCode::insufficient_mixing,
           "batch means stay correlated at the longest usable batch length");

    std::vector<double> next(b / 2);
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = 0.5 * (means[2 * i] + means[2 * i + 1]);
    means = std::move(next);
    batch_len *= 2;
  }
}

std::vector<double> autocorrelation(std::span<const double> xs, std::size_t max_lag) {
  const std::size_t n = xs.size();
  require(n >= 2, ErrorCode::invalid_argument, "autocorrelation needs n >= 2");
  max_lag = std::min(max_lag, n - 1);
  const double mean = anchored_mean(xs);
  double c0 = 0.0;
  for (double x : xs) c0 += (x - mean) * (x - mean);
  c0 /= n;
  std::vector<double> r(max_lag, 0.0);
  if (c0 <= 0.0) return r;  // constant series: define r_k = 0
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t i = 0; i + k < n; ++i)
      ck += (xs[i] - mean) * (xs[i + k] - mean);
    r[k - 1] = ck / n / c0;
  }
  return r;
}

double bartlett_se(std::span<const double> r, std::size_t k, std::size_t n) {
  require(k >= 1 && k <= r.size(), ErrorCode::invalid_argument, "lag out of range");
  double s = 1.0;
  for (std::size_t j = 0; j + 1 < k; ++j) s += 2.0 * r[j] * r[j];
  return std::sqrt(s / n);
}

double integrated_autocorr_time(std::span<const double> xs) {
  const std::size_t n = xs.size();
  const std::size_t max_lag = std::min<std::size_t>(n / 4 + 1, 2000);
  const std::vector<double> r = autocorrelation(xs, max_lag);
  double tau = 0.5;
  for (std::size_t k = 1; k <= r.size(); ++k) {
    tau += r[k - 1];
    if (static_cast<double>(k) >= 5.0 * tau) break;  // Sokal window
  }
  return std::max(tau, 0.5);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 3, ErrorCode::invalid_argument,
          "line fit needs matched samples, n >= 3");
  const std::size_t n = x.size();
  const double mx = anchored_mean(x);
  const double my = anchored_mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorCode::invalid_argument, "degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  f.slope_se = n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
  return f;
}

}  // namespace dysonlab
