#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "dysonlab/common.hpp"

namespace dysonlab {

// Counter-mode generator: draw k is a fixed 64-bit mix of (key, k), where the
// key folds in the seed and the stream id.  Distinct streams from one seed are
// statistically independent, and the full state is (seed, stream, counter),
// so checkpointing a generator costs one integer.
class CounterRng {
 public:
  explicit CounterRng(SamplerSeed s);

  std::uint64_t next_u64();

  // uniform on [0, 1) with 53-bit resolution
  double next_double();
  // uniform on (0, 1]; safe as a log() argument
  double next_open();
  // standard normal via Box-Muller; consumes exactly two uniforms and keeps
  // no cached half-pair, so the counter alone determines the draw sequence
  double next_normal();
  // fills out with iid standard normals, consuming two uniforms per pair
  void fill_normal(Eigen::Ref<Eigen::VectorXd> out);
  double next_exponential(double rate);
  // Marsaglia-Tsang; requires shape >= 1
  double next_gamma(double shape);
  // chi distribution with dof degrees of freedom, dof >= 2 and even
  double next_chi_even(int dof);

  SamplerSeed seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }
  void set_counter(std::uint64_t c) { counter_ = c; }

 private:
  SamplerSeed seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace dysonlab
