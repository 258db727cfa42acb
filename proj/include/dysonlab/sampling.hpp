#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>

#include "dysonlab/common.hpp"
#include "dysonlab/kernel.hpp"
#include "dysonlab/rng.hpp"

namespace dysonlab {

// finite point set restricted to an observation window; points ascending
struct PointConfiguration {
  Eigen::ArrayXd points;
  Interval window;

  Eigen::Index size() const { return points.size(); }
  Eigen::Index count_in(const Interval& w) const;
  void validate() const;
};

// single-line JSON record round-trip
std::string to_json_line(const PointConfiguration& c);
PointConfiguration config_from_json_line(const std::string& line);
void write_csv(std::ostream& os, const PointConfiguration& c);

// eigenvalues (ascending) of the tridiagonal beta=2 Gaussian ensemble of
// order n; for n = 1 this is a single standard normal
Eigen::VectorXd sample_gaussian_spectrum(int n, CounterRng& rng);

// bulk of the rescaled Gaussian ensemble restricted to `window`.  Eigenvalues
// are rescaled by sqrt(n)/rho, which maps the semicircle center density to
// the sine-process intensity rho/pi.  Requires n >= 8, the window inside the
// central quarter of the rescaled support, and at least one expected point.
PointConfiguration sample_gue_bulk(int n, Interval window, const KernelSpec& spec,
                                   SamplerSeed seed);

// midpoint discretization of the sine kernel on a window, eigendecomposed
// once and reusable across replicas
struct DiscretizedKernel {
  KernelSpec spec;
  Interval window;
  Eigen::VectorXd nodes;
  double cell = 0.0;
  Eigen::MatrixXd eigvecs;
  Eigen::VectorXd eigvals;  // clipped into [0, 1]

  double expected_count() const { return eigvals.sum(); }
  // exact count variance of the discretized process, sum lambda (1 - lambda)
  double count_variance() const {
    return (eigvals.array() * (1.0 - eigvals.array())).sum();
  }
};

// mesh = number of quadrature cells across the window; eigenvalues farther
// than 1e-6 outside [0, 1] signal mesh-too-coarse
DiscretizedKernel discretize_kernel(const KernelSpec& spec, Interval window, int mesh);
int default_mesh(const KernelSpec& spec, Interval window);

// determinantal sample via eigenvalue thinning followed by sequential
// conditional draws (Schur-complement recursion on the thinned projection)
PointConfiguration sample_dpp_window(const DiscretizedKernel& dk, SamplerSeed seed);
PointConfiguration sample_dpp_window(const KernelSpec& spec, Interval window,
                                     int mesh, SamplerSeed seed);

// homogeneous Poisson control on a window; guards against expected counts
// of 1e9 or more
PointConfiguration sample_poisson(double intensity, Interval window, SamplerSeed seed);

}  // namespace dysonlab
