#include <doctest.h>

#include <cmath>
#include <string>

#include "dysonlab/config.hpp"

using namespace dysonlab;

namespace {

// field and line of the ConfigError raised by `text`, or FAIL
void expect_config_error(const std::string& text, const std::string& field, int line) {
  try {
    (void)parse_config(text);
    FAIL("expected ConfigError for field " << field);
  } catch (const ConfigError& e) {
    CHECK(e.field() == field);
    CHECK(e.line() == line);
  }
}

}  // namespace

TEST_CASE("an empty config parses to valid defaults") {
  const ExperimentConfig c = parse_config("");
  CHECK(c.experiment == ExperimentKind::sample);
  CHECK(c.output_dir == "out");
  CHECK(c.replicas == 100);
  CHECK(c.seed.seed == 1);
  CHECK(c.seed.stream == 0);
  CHECK(c.sampler.kind == SamplerKind::gue);
  CHECK(c.sampler.n == 512);
  CHECK(c.sampler.window == Interval{-8.0, 8.0});
  CHECK(std::isinf(c.drift.cutoff));
  CHECK(c.policy.dt == 1e-3);
}

TEST_CASE("serialize then parse is the identity on the text form") {
  ExperimentConfig c;
  c.experiment = ExperimentKind::evolve;
  c.output_dir = "runs/deep";
  c.replicas = 7;
  c.seed = SamplerSeed{99, 3};
  c.kernel.rho = 1.75;
  c.sampler.kind = SamplerKind::dpp;
  c.sampler.window = Interval{-5.5, 5.5};
  c.sampler.mesh = 96;
  c.drift.cutoff = 12.5;
  c.evolve.model = Model::truncated_isde;
  c.evolve.horizon = 2.25;
  c.evolve.interior = Interval{-3.0, 3.0};
  c.analyze.input = "runs/deep";
  c.analyze.separations = {0.5, 1.0, 2.0};
  c.analyze.times = {1.0, 10.0, 100.0};

  const std::string text = serialize_config(c);
  const ExperimentConfig back = parse_config(text);
  CHECK(serialize_config(back) == text);
  CHECK(back.drift.cutoff == 12.5);
  CHECK(back.analyze.separations == c.analyze.separations);
  CHECK(config_hash(back) == config_hash(c));
}

TEST_CASE("an infinite cutoff survives the text round trip") {
  const std::string text = serialize_config(ExperimentConfig{});
  CHECK(text.find("cutoff = \"inf\"") != std::string::npos);
  CHECK(std::isinf(parse_config(text).drift.cutoff));
}

TEST_CASE("unknown sections and keys are reported with their line") {
  expect_config_error("[nonsense]\nfoo = 1\n", "nonsense", 2);
  expect_config_error("[kernel]\nrho = 3.0\nbogus = 1\n", "kernel.bogus", 3);
  expect_config_error("replicas = 1\nreplicas = 2\n", "replicas", 2);
}

TEST_CASE("type mismatches name the field and the expectation") {
  expect_config_error("replicas = 2.5\n", "replicas", 1);
  expect_config_error("[kernel]\nrho = \"three\"\n", "kernel.rho", 2);
  expect_config_error("[sampler]\nwindow = [1.0, 2.0, 3.0]\n", "sampler.window", 2);
  expect_config_error("[drift]\ncutoff = \"huge\"\n", "drift.cutoff", 2);

  try {
    (void)parse_config("verify_level = \"weekly\"\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "verify_level");
    CHECK(std::string(e.what()).find("smoke") != std::string::npos);
  }
}

TEST_CASE("syntax problems carry the offending line") {
  CHECK_THROWS_AS((void)parse_config("[sampler\nn = 4\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config("just words\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config("[sampler]\nwindow = [1.0, 2.0\n"), ConfigError);
}

TEST_CASE("semantic validation names the failing field") {
  expect_config_error("[drift]\nbeta = -1.0\n", "drift.beta", 0);
  expect_config_error(
      "experiment = \"evolve\"\n[drift]\ncutoff = 5.0\n[evolve]\nmodel = \"dyson-finite\"\n",
      "drift.cutoff", 0);
  expect_config_error(
      "experiment = \"evolve\"\n[drift]\ncutoff = 5.0\n[evolve]\n"
      "model = \"truncated-isde\"\ninterior = [-9.0, 9.0]\n",
      "evolve.interior", 0);
  expect_config_error("experiment = \"analyze\"\n", "analyze.input", 0);
}

TEST_CASE("comments and quoted hashes are handled") {
  const ExperimentConfig c = parse_config(
      "# leading comment\n"
      "output_dir = \"a#b\"  # trailing comment\n"
      "\n"
      "[seed]\n"
      "seed = 42   # the answer\n");
  CHECK(c.output_dir == "a#b");
  CHECK(c.seed.seed == 42);
}

TEST_CASE("the config hash tracks every field") {
  const ExperimentConfig base;
  ExperimentConfig tweaked = base;
  tweaked.replicas = 101;
  CHECK(config_hash(base) != config_hash(tweaked));

  ExperimentConfig reseeded = base;
  reseeded.seed.stream = 5;
  CHECK(config_hash(base) != config_hash(reseeded));
  CHECK(config_hash(base) == config_hash(ExperimentConfig{}));
}
