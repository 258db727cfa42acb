#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace dysonlab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// closed interval [a, b] on the line
struct Interval {
  double a = 0.0;
  double b = 0.0;

  double length() const { return b - a; }
  double center() const { return 0.5 * (a + b); }
  bool contains(double x) const { return a <= x && x <= b; }
  bool contains(const Interval& w) const { return a <= w.a && w.b <= b; }
  bool valid() const { return a < b; }
  bool operator==(const Interval&) const = default;
};

// seed plus stream id; equal pairs yield bit-identical draw sequences
struct SamplerSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  SamplerSeed with_stream(std::uint64_t s) const { return {seed, s}; }
  bool operator==(const SamplerSeed&) const = default;
};

enum class ErrorCode {
  invalid_argument,
  out_of_range,
  insufficient_bulk,
  eigensolver_failure,
  mesh_too_coarse,
  numerical_breakdown,
  overflow_guard,
  collision,
  min_step_reached,
  boundary_escape,
  window_mismatch,
  too_many_escapes,
  cutoff_too_small,
  insufficient_mixing,
  checksum_mismatch,
  io_error,
};

const char* to_string(ErrorCode c);

// runtime failure with a machine-checkable code and, where meaningful,
// the simulation time at which the failure occurred
class SimError : public std::runtime_error {
 public:
  SimError(ErrorCode code, const std::string& what, double when = -1.0)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        when_(when) {}

  ErrorCode code() const { return code_; }
  double when() const { return when_; }

 private:
  ErrorCode code_;
  double when_;
};

[[noreturn]] inline void fail(ErrorCode c, const std::string& msg,
                              double when = -1.0) {
  throw SimError(c, msg, when);
}

inline void require(bool ok, ErrorCode c, const std::string& msg) {
  if (!ok) fail(c, msg);
}

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::out_of_range: return "out-of-range";
    case ErrorCode::insufficient_bulk: return "insufficient-bulk";
    case ErrorCode::eigensolver_failure: return "eigensolver-failure";
    case ErrorCode::mesh_too_coarse: return "mesh-too-coarse";
    case ErrorCode::numerical_breakdown: return "numerical-breakdown";
    case ErrorCode::overflow_guard: return "overflow-guard";
    case ErrorCode::collision: return "collision";
    case ErrorCode::min_step_reached: return "min-step-reached";
    case ErrorCode::boundary_escape: return "boundary-escape";
    case ErrorCode::window_mismatch: return "window-mismatch";
    case ErrorCode::too_many_escapes: return "too-many-escapes";
    case ErrorCode::cutoff_too_small: return "cutoff-too-small";
    case ErrorCode::insufficient_mixing: return "insufficient-mixing";
    case ErrorCode::checksum_mismatch: return "checksum-mismatch";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

// 64-bit FNV-1a, used for config hashes and snapshot checksums
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(s.data(), s.size());
}

}  // namespace dysonlab
