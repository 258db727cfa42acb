#include "dysonlab/sampling.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "dysonlab/stats.hpp"

namespace dysonlab {

using nlohmann::json;

Eigen::Index PointConfiguration::count_in(const Interval& w) const {
  const double* b = points.data();
  const double* e = b + points.size();
  return std::upper_bound(b, e, w.b) - std::lower_bound(b, e, w.a);
}

void PointConfiguration::validate() const {
  require(window.valid(), ErrorCode::invalid_argument, "window must satisfy a < b");
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    require(std::isfinite(points[i]) && window.contains(points[i]),
            ErrorCode::invalid_argument, "points must lie inside the window");
    if (i > 0)
      require(points[i - 1] <= points[i], ErrorCode::invalid_argument,
              "points must be sorted ascending");
  }
}

std::string to_json_line(const PointConfiguration& c) {
  json j;
  j["window"] = {c.window.a, c.window.b};
  j["points"] = std::vector<double>(c.points.data(), c.points.data() + c.points.size());
  return j.dump();
}

PointConfiguration config_from_json_line(const std::string& line) {
  json j = json::parse(line);
  PointConfiguration c;
  c.window = {j.at("window").at(0).get<double>(), j.at("window").at(1).get<double>()};
  const auto pts = j.at("points").get<std::vector<double>>();
  c.points = Eigen::Map<const Eigen::ArrayXd>(pts.data(), pts.size());
  c.validate();
  return c;
}

void write_csv(std::ostream& os, const PointConfiguration& c) {
  os << "# window," << c.window.a << "," << c.window.b << "\n";
  os.precision(17);
  for (Eigen::Index i = 0; i < c.points.size(); ++i) os << c.points[i] << "\n";
}

Eigen::VectorXd sample_gaussian_spectrum(int n, CounterRng& rng) {
  require(n >= 1, ErrorCode::invalid_argument, "matrix order must be >= 1");
  Eigen::VectorXd diag(n);
  rng.fill_normal(diag);
  if (n == 1) return diag;
  // beta = 2 tridiagonal model: off-diagonal chi_{2(n-k)} / sqrt(2)
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k)
    sub[k - 1] = rng.next_chi_even(2 * (n - k)) / std::sqrt(2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorCode::eigensolver_failure,
          "tridiagonal eigensolver did not converge");
  return es.eigenvalues();
}

PointConfiguration sample_gue_bulk(int n, Interval window, const KernelSpec& spec,
                                   SamplerSeed seed) {
  spec.validate();
  require(n >= 8, ErrorCode::invalid_argument, "bulk extraction requires n >= 8");
  require(window.valid(), ErrorCode::invalid_argument, "window must satisfy a < b");

  // rescale x -> x * sqrt(n)/rho: center density sqrt(n)/pi becomes rho/pi
  const double gamma = std::sqrt(static_cast<double>(n)) / spec.rho;
  const double quarter = 0.25 * 2.0 * n / spec.rho;  // quarter of the support edge
  require(std::max(std::abs(window.a), std::abs(window.b)) <= quarter,
          ErrorCode::insufficient_bulk,
          "window must sit inside the central quarter of the rescaled spectrum");

  // expected count under the rescaled semicircle
  const double edge = 2.0 * n / spec.rho;
  auto cdf = [&](double y) { return semicircle_cdf(2.0 * y / edge); };
  const double expected = n * (cdf(window.b) - cdf(window.a));
  require(expected >= 1.0, ErrorCode::insufficient_bulk,
          "window too small: expected bulk count below one");

  CounterRng rng(seed);
  Eigen::VectorXd lam = sample_gaussian_spectrum(n, rng);

  const double* b = lam.data();
  const double* e = b + lam.size();
  const double* lo = std::lower_bound(b, e, window.a / gamma);
  const double* hi = std::upper_bound(b, e, window.b / gamma);

  PointConfiguration out;
  out.window = window;
  out.points.resize(hi - lo);
  for (Eigen::Index i = 0; i < out.points.size(); ++i) out.points[i] = lo[i] * gamma;
  return out;
}

int default_mesh(const KernelSpec& spec, Interval window) {
  // 16 cells per unit mean spacing pi/rho
  return static_cast<int>(std::ceil(16.0 * window.length() * spec.rho / 3.141592653589793));
}

DiscretizedKernel discretize_kernel(const KernelSpec& spec, Interval window, int mesh) {
  spec.validate();
  require(window.valid(), ErrorCode::invalid_argument, "window must satisfy a < b");
  require(mesh >= 1, ErrorCode::invalid_argument, "mesh must be a positive integer");

  DiscretizedKernel dk;
  dk.spec = spec;
  dk.window = window;
  dk.cell = window.length() / mesh;
  dk.nodes.resize(mesh);
  for (int i = 0; i < mesh; ++i) dk.nodes[i] = window.a + (i + 0.5) * dk.cell;

  Eigen::MatrixXd a(mesh, mesh);
  for (int j = 0; j < mesh; ++j)
    for (int i = 0; i < mesh; ++i)
      a(i, j) = dk.cell * sine_kernel(dk.nodes[i], dk.nodes[j], spec.rho);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  require(es.info() == Eigen::Success, ErrorCode::eigensolver_failure,
          "kernel eigendecomposition did not converge");

  dk.eigvals = es.eigenvalues();
  dk.eigvecs = es.eigenvectors();
  constexpr double tol = 1e-6;
  for (Eigen::Index k = 0; k < dk.eigvals.size(); ++k) {
    double& l = dk.eigvals[k];
    require(l >= -tol && l <= 1.0 + tol, ErrorCode::mesh_too_coarse,
            "kernel eigenvalue escapes [0,1]: refine the mesh");
    l = std::clamp(l, 0.0, 1.0);
  }
  return dk;
}

PointConfiguration sample_dpp_window(const DiscretizedKernel& dk, SamplerSeed seed) {
  CounterRng rng(seed);
  const Eigen::Index m = dk.nodes.size();

  // Bernoulli thinning of eigenmodes
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = 0; k < m; ++k)
    if (rng.next_double() < dk.eigvals[k]) kept.push_back(k);

  PointConfiguration out;
  out.window = dk.window;
  const Eigen::Index r = static_cast<Eigen::Index>(kept.size());
  if (r == 0) {
    out.points.resize(0);
    return out;
  }

  Eigen::MatrixXd v(m, r);
  for (Eigen::Index k = 0; k < r; ++k) v.col(k) = dk.eigvecs.col(kept[k]);

  // Sequential conditionals for the projection onto span(v): maintain
  // residual diagonal c and orthonormalized feature columns w of the chosen
  // points; c_i = K'(i,i) - sum_s w_s(i)^2 is the next conditional density.
  Eigen::VectorXd c = v.array().square().rowwise().sum();
  Eigen::MatrixXd w(m, r);
  std::vector<double> chosen;
  chosen.reserve(r);

  const double scale = std::max(1.0, c.maxCoeff());
  constexpr double rel_tol = 1e-8;

  for (Eigen::Index t = 0; t < r; ++t) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      require(c[i] > -rel_tol * scale, ErrorCode::numerical_breakdown,
              "sequential conditional density went negative");
      total += std::max(c[i], 0.0);
    }
    require(total > 0.0, ErrorCode::numerical_breakdown,
            "sequential conditional density vanished");

    double u = rng.next_double() * total;
    Eigen::Index y = m - 1;
    for (Eigen::Index i = 0; i < m; ++i) {
      u -= std::max(c[i], 0.0);
      if (u <= 0.0) {
        y = i;
        break;
      }
    }
    while (c[y] <= 0.0 && y > 0) --y;  // land on positive mass
    chosen.push_back(dk.nodes[y]);

    // w_t = (K'(:,y) - sum_s w_s w_s(y)) / sqrt(c_y); then c -= w_t^2
    Eigen::VectorXd wt = v * v.row(y).transpose();
    if (t > 0) wt.noalias() -= w.leftCols(t) * w.row(y).head(t).transpose();
    wt /= std::sqrt(std::max(c[y], rel_tol * scale * 1e-4));
    w.col(t) = wt;
    c -= wt.array().square().matrix();
    c[y] = 0.0;
  }

  std::sort(chosen.begin(), chosen.end());
  out.points = Eigen::Map<const Eigen::ArrayXd>(chosen.data(), chosen.size());
  return out;
}

PointConfiguration sample_dpp_window(const KernelSpec& spec, Interval window,
                                     int mesh, SamplerSeed seed) {
  return sample_dpp_window(discretize_kernel(spec, window, mesh), seed);
}

PointConfiguration sample_poisson(double intensity, Interval window, SamplerSeed seed) {
  require(std::isfinite(intensity) && intensity > 0.0, ErrorCode::invalid_argument,
          "intensity must be finite and positive");
  require(window.valid(), ErrorCode::invalid_argument, "window must satisfy a < b");
  require(intensity * window.length() < 1e9, ErrorCode::overflow_guard,
          "expected count exceeds the overflow guard");

  CounterRng rng(seed);
  std::vector<double> pts;
  double t = window.a;
  for (;;) {
    t += rng.next_exponential(intensity);
    if (t >= window.b) break;
    pts.push_back(t);
  }
  PointConfiguration out;
  out.window = window;
  out.points = Eigen::Map<const Eigen::ArrayXd>(pts.data(), pts.size());
  return out;
}

}  // namespace dysonlab
