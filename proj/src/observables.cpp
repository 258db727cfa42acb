#include "dysonlab/observables.hpp"

#include <algorithm>
#include <cmath>

namespace dysonlab {

namespace {

constexpr double kPi = 3.141592653589793;

void require_shared_window(std::span<const PointConfiguration> configs) {
  require(!configs.empty(), ErrorCode::invalid_argument, "need at least one configuration");
  for (const auto& c : configs)
    require(c.window == configs[0].window, ErrorCode::window_mismatch,
            "configurations must share one window");
}

// smooth compact bump exp(1 - 1/(1 - t^2)) on |t| < 1
inline double bump(double t) {
  const double t2 = t * t;
  return t2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t2)) : 0.0;
}

inline double bump_dt(double t) {
  const double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  const double d = 1.0 - t2;
  return bump(t) * (-2.0 * t / (d * d));
}

}  // namespace

const char* to_string(ObservableKind k) {
  switch (k) {
    case ObservableKind::count_in_window: return "count-in-window";
    case ObservableKind::linear_statistic: return "linear-statistic";
    case ObservableKind::indicator_of_gap: return "indicator-of-gap";
    case ObservableKind::polynomial_local: return "polynomial-local";
  }
  return "unknown";
}

ObservableKind observable_from_string(const std::string& s) {
  if (s == "count-in-window") return ObservableKind::count_in_window;
  if (s == "linear-statistic") return ObservableKind::linear_statistic;
  if (s == "indicator-of-gap") return ObservableKind::indicator_of_gap;
  if (s == "polynomial-local") return ObservableKind::polynomial_local;
  fail(ErrorCode::invalid_argument, "unknown observable: " + s);
}

void ObservableSpec::validate() const {
  require(window.valid(), ErrorCode::invalid_argument, "observable window must satisfy a < b");
  if (kind == ObservableKind::polynomial_local)
    require(!coeffs.empty(), ErrorCode::invalid_argument,
            "polynomial observable needs coefficients");
}

double eval_observable(const ObservableSpec& spec, std::span<const double> points) {
  spec.validate();
  const double c = spec.window.center();
  const double hw = 0.5 * spec.window.length();
  switch (spec.kind) {
    case ObservableKind::count_in_window: {
      double n = 0.0;
      for (double x : points) n += spec.window.contains(x) ? 1.0 : 0.0;
      return n;
    }
    case ObservableKind::linear_statistic: {
      double s = 0.0;
      for (double x : points) {
        const double t = (x - c) / hw;
        if (std::abs(t) < 1.0) s += 0.5 * (1.0 + std::cos(kPi * t));
      }
      return s;
    }
    case ObservableKind::indicator_of_gap: {
      for (double x : points)
        if (spec.window.contains(x)) return 0.0;
      return 1.0;
    }
    case ObservableKind::polynomial_local: {
      double s = 0.0;
      for (double x : points) {
        if (!spec.window.contains(x)) continue;
        double p = 0.0;
        for (std::size_t k = spec.coeffs.size(); k-- > 0;)
          p = p * (x - c) + spec.coeffs[k];
        s += p;
      }
      return s;
    }
  }
  fail(ErrorCode::invalid_argument, "unknown observable kind");
}

Curve estimate_one_point(std::span<const PointConfiguration> configs, int bins) {
  require_shared_window(configs);
  require(bins >= 1, ErrorCode::invalid_argument, "bins must be positive");

  const Interval w = configs[0].window;
  const double width = w.length() / bins;
  const std::size_t n = configs.size();

  // per-config bin counts, then mean and se per bin in intensity units
  std::vector<std::vector<double>> counts(bins, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < configs[k].size(); ++i) {
      int b = static_cast<int>((configs[k].points[i] - w.a) / width);
      b = std::clamp(b, 0, bins - 1);
      counts[b][k] += 1.0;
    }

  Curve out;
  out.n = n;
  for (int b = 0; b < bins; ++b) {
    const MeanVar mv = summarize(counts[b]);
    out.x.push_back(w.a + (b + 0.5) * width);
    out.value.push_back(mv.mean / width);
    out.se.push_back(mv.se_mean() / width);
  }
  return out;
}

Curve estimate_two_point(std::span<const PointConfiguration> configs,
                         std::span<const double> separations, double h) {
  require_shared_window(configs);
  require(!separations.empty(), ErrorCode::invalid_argument, "need separations");
  require(h > 0.0, ErrorCode::invalid_argument, "bin half-width must be positive");
  for (double u : separations)
    require(u > 0.0, ErrorCode::invalid_argument, "separations must be positive");
  std::vector<double> grid(separations.begin(), separations.end());
  std::sort(grid.begin(), grid.end());
  for (std::size_t g = 1; g < grid.size(); ++g)
    require(grid[g] - grid[g - 1] >= 2.0 * h, ErrorCode::invalid_argument,
            "separation grid must be spaced at least 2h apart");

  const Interval w = configs[0].window;
  const double umax = grid.back() + h;
  const Interval inner{w.a, w.b - umax};
  require(inner.valid(), ErrorCode::invalid_argument,
          "window too small for the largest separation");
  const std::size_t n = configs.size();
  const std::size_t ng = grid.size();

  std::vector<std::vector<double>> density(ng, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    const auto& pts = configs[k].points;
    for (Eigen::Index i = 0; i < pts.size(); ++i) {
      if (pts[i] > inner.b) break;  // left point restricted to the inner window
      for (Eigen::Index j = i + 1; j < pts.size(); ++j) {
        const double u = pts[j] - pts[i];
        if (u > umax) break;
        // nearest grid point, counted when within the bin
        const auto it = std::lower_bound(grid.begin(), grid.end(), u);
        for (const auto cand : {it, it == grid.begin() ? it : it - 1}) {
          if (cand != grid.end() && std::abs(u - *cand) <= h) {
            density[cand - grid.begin()][k] += 1.0;
            break;
          }
        }
      }
    }
  }

  Curve out;
  out.n = n;
  const double norm = 2.0 * h * inner.length();
  for (std::size_t g = 0; g < ng; ++g) {
    for (double& v : density[g]) v /= norm;
    const MeanVar mv = summarize(density[g]);
    out.x.push_back(grid[g]);
    out.value.push_back(mv.mean);
    out.se.push_back(mv.se_mean());
  }
  return out;
}

Curve counting_variance_curve(std::span<const PointConfiguration> configs,
                              std::span<const double> radii) {
  require_shared_window(configs);
  require(!radii.empty(), ErrorCode::invalid_argument, "need radii");
  const Interval w = configs[0].window;
  const double c = w.center();
  const std::size_t n = configs.size();
  require(n >= 2, ErrorCode::invalid_argument, "variance needs n >= 2");

  Curve out;
  out.n = n;
  std::vector<double> counts(n);
  for (double r : radii) {
    require(r > 0.0 && w.contains(Interval{c - r, c + r}), ErrorCode::invalid_argument,
            "counting interval must sit inside the window");
    for (std::size_t k = 0; k < n; ++k)
      counts[k] = static_cast<double>(configs[k].count_in({c - r, c + r}));
    const MeanVar mv = summarize(counts);
    out.x.push_back(r);
    out.value.push_back(mv.var);
    out.se.push_back(mv.se_var());
  }
  return out;
}

RigidityResult rigidity_statistic(std::span<const PointConfiguration> configs,
                                  Interval interior,
                                  std::span<const double> taper_widths) {
  require_shared_window(configs);
  require(interior.valid(), ErrorCode::invalid_argument, "interior must satisfy a < b");
  require(!taper_widths.empty(), ErrorCode::invalid_argument, "need taper widths");
  const Interval w = configs[0].window;
  require(w.contains(interior), ErrorCode::window_mismatch,
          "interior must sit inside the window");
  const std::size_t n = configs.size();
  require(n >= 8, ErrorCode::invalid_argument, "rigidity needs n >= 8");

  std::vector<double> ncount(n);
  for (std::size_t k = 0; k < n; ++k)
    ncount[k] = static_cast<double>(configs[k].count_in(interior));
  const MeanVar mv_n = summarize(ncount);

  RigidityResult out;
  out.var_count = mv_n.var;
  out.n = n;

  std::vector<double> s(n);
  for (double width : taper_widths) {
    require(width > 0.0, ErrorCode::invalid_argument, "taper width must be positive");
    require(w.contains({interior.a - width, interior.b + width}),
            ErrorCode::window_mismatch, "taper must sit inside the window");

    // cosine taper on the exterior: 1 at the interior edge, 0 beyond width
    for (std::size_t k = 0; k < n; ++k) {
      double acc = 0.0;
      const auto& pts = configs[k].points;
      for (Eigen::Index i = 0; i < pts.size(); ++i) {
        const double x = pts[i];
        if (interior.contains(x)) continue;
        const double d = x < interior.a ? interior.a - x : x - interior.b;
        if (d < width) acc += 0.5 * (1.0 + std::cos(kPi * d / width));
      }
      s[k] = acc;
    }

    const MeanVar mv_s = summarize(s);
    double cov = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      cov += (ncount[k] - mv_n.mean) * (s[k] - mv_s.mean);
    cov /= (n - 1);
    const double denom = mv_n.var * mv_s.var;
    const double r2 = denom > 0.0 ? cov * cov / denom : 0.0;
    out.taper_widths.push_back(width);
    out.unexplained.push_back(std::clamp(1.0 - r2, 0.0, 1.0));
  }
  return out;
}

Curve tagged_msd_from_positions(const std::vector<std::vector<double>>& tagged,
                                std::span<const double> times,
                                std::size_t n_attempted) {
  require(!times.empty(), ErrorCode::invalid_argument, "need a time grid");
  require(n_attempted >= tagged.size() && n_attempted > 0, ErrorCode::invalid_argument,
          "attempted count below usable count");
  const double excluded =
      static_cast<double>(n_attempted - tagged.size()) / static_cast<double>(n_attempted);
  require(excluded <= 0.2, ErrorCode::too_many_escapes,
          "more than 20% of trajectories were excluded");
  require(tagged.size() >= 2, ErrorCode::invalid_argument, "need at least two trajectories");
  for (const auto& tr : tagged)
    require(tr.size() == times.size() + 1, ErrorCode::invalid_argument,
            "tagged positions must hold the origin plus one value per time");

  Curve out;
  out.n = tagged.size();
  std::vector<double> sq(tagged.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    for (std::size_t k = 0; k < tagged.size(); ++k) {
      const double d = tagged[k][j + 1] - tagged[k][0];
      sq[k] = d * d;
    }
    const MeanVar mv = summarize(sq);
    out.x.push_back(times[j]);
    out.value.push_back(mv.mean);
    out.se.push_back(mv.se_mean());
  }
  return out;
}

Curve tagged_msd(std::span<const TrajectoryRecord> records, Eigen::Index tag,
                 std::span<const double> times) {
  require(!records.empty(), ErrorCode::invalid_argument, "need trajectory records");
  std::vector<std::vector<double>> tagged;
  for (const auto& rec : records) {
    if (rec.status != RunStatus::completed) continue;
    require(!rec.snapshots.empty(), ErrorCode::invalid_argument, "empty record");
    require(tag >= 0 && tag < rec.snapshots[0].positions.size(),
            ErrorCode::invalid_argument, "tag index out of range");
    std::vector<double> tr;
    tr.push_back(rec.snapshots[0].positions[tag]);
    for (double t : times) {
      // first snapshot at or after t; fall back to the final state
      const Snapshot* hit = nullptr;
      for (const auto& s : rec.snapshots)
        if (s.time >= t) {
          hit = &s;
          break;
        }
      if (!hit && rec.final.time >= t) hit = &rec.final;
      require(hit != nullptr, ErrorCode::invalid_argument,
              "record does not cover the time grid");
      tr.push_back(hit->positions[tag]);
    }
    tagged.push_back(std::move(tr));
  }
  return tagged_msd_from_positions(tagged, times, records.size());
}

double IbpTestFunction::a(double s) const { return bump((s - a_center) / a_halfwidth); }

double IbpTestFunction::a_prime(double s) const {
  return bump_dt((s - a_center) / a_halfwidth) / a_halfwidth;
}

double IbpTestFunction::g(double s) const { return bump((s - g_center) / g_halfwidth); }

EstimateWithCI ibp_residual(std::span<const PointConfiguration> configs,
                            const IbpTestFunction& f, double cutoff) {
  require_shared_window(configs);
  require(std::isfinite(cutoff) && cutoff > 0.0, ErrorCode::invalid_argument,
          "cutoff must be finite and positive");
  const Interval w = configs[0].window;
  require(w.contains({f.a_center - f.a_halfwidth - cutoff,
                      f.a_center + f.a_halfwidth + cutoff}),
          ErrorCode::window_mismatch,
          "cutoff ball around supp(a) must sit inside the window");

  std::vector<double> res(configs.size());
  for (std::size_t k = 0; k < configs.size(); ++k) {
    const auto& pts = configs[k].points;
    const Eigen::Index m = pts.size();

    double sum_g = 0.0;
    if (f.b_kind == IbpTestFunction::BKind::tanh_bump)
      for (Eigen::Index j = 0; j < m; ++j) sum_g += f.g(pts[j]);

    double acc = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double s = pts[i];
      const double ai = f.a(s);
      const double api = f.a_prime(s);
      if (ai == 0.0 && api == 0.0) continue;

      double d = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (j == i) continue;
        const double gap = s - pts[j];
        if (std::abs(gap) < cutoff) d += 1.0 / gap;
      }
      d *= 2.0;

      double b = 1.0;
      if (f.b_kind == IbpTestFunction::BKind::tanh_bump)
        b = std::tanh(sum_g - f.g(s));  // configuration minus the base point
      acc += (d * ai + api) * b;
    }
    res[k] = acc;
  }

  const MeanVar mv = summarize(res);
  return {mv.mean, mv.se_mean(), mv.n, CiMethod::iid};
}

ErgodicityGap ergodicity_gap(std::span<const double> series,
                             std::span<const double> ensemble,
                             std::size_t min_batches) {
  require(ensemble.size() >= 2, ErrorCode::invalid_argument,
          "ensemble needs at least two samples");
  const BatchMeans bm = batch_means(series, min_batches);
  const MeanVar mv = summarize(ensemble);

  ErgodicityGap out;
  out.time_mean = bm.mean;
  out.time_se = bm.se;
  out.ensemble_mean = mv.mean;
  out.ensemble_se = mv.se_mean();
  out.gap = bm.mean - mv.mean;
  out.se = std::sqrt(bm.se * bm.se + out.ensemble_se * out.ensemble_se);
  out.batches = bm.batches;
  out.batch_len = bm.batch_len;
  return out;
}

Curve autocorrelation_curve(std::span<const double> series, std::size_t max_lag) {
  const std::vector<double> r = autocorrelation(series, max_lag);
  Curve out;
  out.n = series.size();
  out.method = CiMethod::batch;
  for (std::size_t k = 1; k <= r.size(); ++k) {
    out.x.push_back(static_cast<double>(k));
    out.value.push_back(r[k - 1]);
    out.se.push_back(bartlett_se(r, k, series.size()));
  }
  return out;
}

}  // namespace dysonlab
