#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dysonlab/common.hpp"
#include "dysonlab/dynamics.hpp"
#include "dysonlab/kernel.hpp"
#include "dysonlab/observables.hpp"

namespace dysonlab {

// config file problem: carries the offending field path and line (0 when the
// failure is semantic rather than syntactic); maps to exit code 2
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, int line, const std::string& message)
      : std::runtime_error(line > 0
                               ? "config field '" + field + "' (line " +
                                     std::to_string(line) + "): " + message
                               : "config field '" + field + "': " + message),
        field_(std::move(field)),
        line_(line) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

enum class ExperimentKind { sample, evolve, analyze, verify };
enum class SamplerKind { gue, dpp, poisson };
enum class VerifyLevel { smoke, full };

struct SamplerConfig {
  SamplerKind kind = SamplerKind::gue;
  int n = 512;                  // gue matrix order
  Interval window{-8.0, 8.0};
  int mesh = 0;                 // dpp quadrature cells; 0 = default density
  double intensity = 1.0;       // poisson
};

struct EvolveConfig {
  Model model = Model::dyson_finite;
  int n = 8;                    // particle count for dyson-finite
  double horizon = 1.0;
  double snapshot_every = 0.1;
  Interval start{-2.0, 2.0};    // equally spaced initial positions
  Interval interior{-4.0, 4.0}; // truncated-isde interior carve
};

struct AnalyzeConfig {
  std::string input;
  std::string observable = "one-point";
  Interval window{-1.0, 1.0};
  int bins = 20;
  double halfwidth = 0.125;
  std::vector<double> separations;
  std::vector<double> radii;
  std::vector<double> coeffs;
  int max_lag = 50;
  int tag = 0;
  std::vector<double> times;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::sample;
  std::string output_dir = "out";
  std::size_t replicas = 100;
  VerifyLevel verify_level = VerifyLevel::smoke;
  SamplerSeed seed{1, 0};
  KernelSpec kernel;
  SamplerConfig sampler;
  DriftSpec drift;
  ChamberSpec chamber;
  StepPolicy policy{1e-3, 1e-9, 20};
  EvolveConfig evolve;
  AnalyzeConfig analyze;

  // semantic checks; throws ConfigError naming the field
  void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// canonical text form; parse(serialize(c)) reproduces c exactly
std::string serialize_config(const ExperimentConfig& c);
std::uint64_t config_hash(const ExperimentConfig& c);

const char* to_string(ExperimentKind k);
const char* to_string(SamplerKind k);
const char* to_string(VerifyLevel k);

}  // namespace dysonlab
