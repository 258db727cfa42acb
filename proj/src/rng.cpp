#include "dysonlab/rng.hpp"

#include <cmath>

namespace dysonlab {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer; full-avalanche bijection on 64 bits
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(SamplerSeed s) : seed_(s) {
  // two finalizer rounds decorrelate (seed, stream) pairs that differ in one bit
  key_ = mix64(mix64(s.seed + kGolden) ^ mix64(s.stream + 0x6a09e667f3bcc909ull));
}

std::uint64_t CounterRng::next_u64() {
  counter_ += 1;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::next_open() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::next_normal() {
  const double u = next_open();
  const double v = next_double();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925287 * v);
}

void CounterRng::fill_normal(Eigen::Ref<Eigen::VectorXd> out) {
  const Eigen::Index n = out.size();
  Eigen::Index i = 0;
  for (; i + 1 < n; i += 2) {
    const double u = next_open();
    const double v = next_double();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double t = 6.283185307179586476925287 * v;
    out[i] = r * std::cos(t);
    out[i + 1] = r * std::sin(t);
  }
  if (i < n) out[i] = next_normal();
}

double CounterRng::next_exponential(double rate) {
  require(rate > 0.0, ErrorCode::invalid_argument, "exponential rate must be positive");
  return -std::log(next_open()) / rate;
}

double CounterRng::next_gamma(double shape) {
  require(shape >= 1.0, ErrorCode::invalid_argument, "gamma shape must be >= 1");
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = next_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = next_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double CounterRng::next_chi_even(int dof) {
  require(dof >= 2 && dof % 2 == 0, ErrorCode::invalid_argument,
          "chi draw needs an even dof >= 2");
  // chi_k^2 / 2 ~ Gamma(k/2) for even k
  return std::sqrt(2.0 * next_gamma(0.5 * dof));
}

}  // namespace dysonlab
