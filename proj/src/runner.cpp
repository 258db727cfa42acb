#include "dysonlab/runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <streambuf>
#include <string>
#include <vector>

#include "dysonlab/config.hpp"
#include "dysonlab/dynamics.hpp"
#include "dysonlab/ensemble.hpp"
#include "dysonlab/observables.hpp"
#include "dysonlab/sampling.hpp"
#include "dysonlab/stats.hpp"
#include "dysonlab/trajectory.hpp"
#include "dysonlab/verify.hpp"

namespace dysonlab {

namespace {

namespace fs = std::filesystem;

const char* module_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::eigensolver_failure:
    case ErrorCode::insufficient_bulk:
    case ErrorCode::mesh_too_coarse:
    case ErrorCode::numerical_breakdown:
    case ErrorCode::overflow_guard:
      return "sampling";
    case ErrorCode::collision:
    case ErrorCode::min_step_reached:
    case ErrorCode::boundary_escape:
      return "dynamics";
    case ErrorCode::checksum_mismatch:
    case ErrorCode::io_error:
      return "trajectory";
    case ErrorCode::window_mismatch:
    case ErrorCode::too_many_escapes:
    case ErrorCode::insufficient_mixing:
      return "observables";
    default:
      return "core";
  }
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  require(os.good(), ErrorCode::io_error, "cannot open " + p.string());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  require(os.good(), ErrorCode::io_error, "short write to " + p.string());
}

void write_curve(const fs::path& results, const std::string& name, const Curve& c) {
  std::string csv = "x,value,se\n";
  for (std::size_t i = 0; i < c.x.size(); ++i)
    csv += num(c.x[i]) + "," + num(c.value[i]) + "," + num(c.se[i]) + "\n";
  write_text(results / (name + ".csv"), csv);

  nlohmann::json j;
  j["n"] = c.n;
  j["method"] = c.method == CiMethod::iid ? "iid" : "batch";
  j["x"] = c.x;
  j["value"] = c.value;
  j["se"] = c.se;
  write_text(results / (name + ".json"), j.dump(2) + "\n");
}

// one sampler, built once (the determinantal kernel factorizes up front) and
// drawn from concurrently
struct SamplerHandle {
  SamplerKind kind;
  int n;
  Interval window;
  double intensity;
  KernelSpec kernel;
  std::optional<DiscretizedKernel> dk;

  explicit SamplerHandle(const ExperimentConfig& cfg)
      : kind(cfg.sampler.kind),
        n(cfg.sampler.n),
        window(cfg.sampler.window),
        intensity(cfg.sampler.intensity),
        kernel(cfg.kernel) {
    if (kind == SamplerKind::dpp) {
      const int mesh = cfg.sampler.mesh > 0 ? cfg.sampler.mesh
                                            : default_mesh(kernel, window);
      dk = discretize_kernel(kernel, window, mesh);
    }
  }

  PointConfiguration draw(SamplerSeed seed) const {
    switch (kind) {
      case SamplerKind::gue: return sample_gue_bulk(n, window, kernel, seed);
      case SamplerKind::dpp: return sample_dpp_window(*dk, seed);
      case SamplerKind::poisson: return sample_poisson(intensity, window, seed);
    }
    fail(ErrorCode::invalid_argument, "unknown sampler kind");
  }
};

// split one configuration at the carve interval: inside moves, outside
// freezes, and the escape window reaches to the nearest frozen point on
// each side
void carve_isde(const PointConfiguration& cfg, Interval carve, ModelSpec& model,
                LabeledConfiguration& init) {
  std::vector<double> in, out;
  double wall_lo = carve.a - 2.0, wall_hi = carve.b + 2.0;
  for (Eigen::Index i = 0; i < cfg.size(); ++i) {
    const double x = cfg.points[i];
    if (carve.contains(x)) {
      in.push_back(x);
    } else {
      out.push_back(x);
      if (x < carve.a) wall_lo = std::max(wall_lo, x);
      else wall_hi = std::min(wall_hi, x);
    }
  }
  require(in.size() >= 2, ErrorCode::insufficient_bulk,
          "interior carve captured fewer than 2 points");
  model.exterior.points =
      Eigen::Map<const Eigen::ArrayXd>(out.data(), static_cast<Eigen::Index>(out.size()));
  model.exterior.window = cfg.window;
  model.interior_window = Interval{wall_lo, wall_hi};
  init.positions =
      Eigen::Map<const Eigen::VectorXd>(in.data(), static_cast<Eigen::Index>(in.size()));
  init.time = 0.0;
}

void write_manifest(const fs::path& file, const ExperimentConfig& cfg,
                    double wall_seconds) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["code_version"] = kVersion;
  j["experiment"] = to_string(cfg.experiment);
  j["seed"] = {{"seed", cfg.seed.seed}, {"stream", cfg.seed.stream}};
  char hex[24];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  j["config_hash"] = hex;
  j["replicas"] = cfg.replicas;
  j["workers"] = worker_count();
  j["wall_time_seconds"] = wall_seconds;
  write_text(file, j.dump(2) + "\n");
}

// --- experiments -----------------------------------------------------------

void do_sample(const ExperimentConfig& cfg, const fs::path& root, std::ostream& out) {
  const SamplerHandle sampler(cfg);
  std::vector<PointConfiguration> cfgs(cfg.replicas);
  parallel_for(cfg.replicas, [&](std::size_t k) {
    cfgs[k] = sampler.draw(cfg.seed.with_stream(cfg.seed.stream + k));
  });

  std::string jsonl, csv = "replica,count\n";
  std::vector<double> counts(cfg.replicas);
  for (std::size_t k = 0; k < cfg.replicas; ++k) {
    jsonl += to_json_line(cfgs[k]);
    jsonl += '\n';
    counts[k] = static_cast<double>(cfgs[k].size());
    csv += std::to_string(k) + "," + std::to_string(cfgs[k].size()) + "\n";
  }
  write_text(root / "results" / "configs.jsonl", jsonl);
  write_text(root / "results" / "counts.csv", csv);

  const MeanVar mv = summarize(counts);
  nlohmann::json j;
  j["replicas"] = cfg.replicas;
  j["sampler"] = to_string(cfg.sampler.kind);
  j["window"] = {cfg.sampler.window.a, cfg.sampler.window.b};
  j["mean_count"] = mv.mean;
  j["se_count"] = mv.se_mean();
  write_text(root / "results" / "summary.json", j.dump(2) + "\n");
  out << "sampled " << cfg.replicas << " configurations ("
      << to_string(cfg.sampler.kind) << "), mean count " << num(mv.mean) << "\n";
}

void do_evolve(const ExperimentConfig& cfg, const fs::path& root, std::ostream& out) {
  const std::optional<SamplerHandle> sampler =
      cfg.evolve.model == Model::truncated_isde
          ? std::optional<SamplerHandle>(std::in_place, cfg)
          : std::nullopt;
  fs::create_directories(root / "trajectories");

  std::vector<std::string> rows(cfg.replicas);
  std::size_t escaped = 0;
  parallel_for(cfg.replicas, [&](std::size_t k) {
    ModelSpec model;
    model.model = cfg.evolve.model;
    model.drift = cfg.drift;
    model.chamber = cfg.chamber;

    LabeledConfiguration init;
    if (cfg.evolve.model == Model::truncated_isde) {
      const PointConfiguration drawn =
          sampler->draw(cfg.seed.with_stream(cfg.seed.stream + 2 * k));
      carve_isde(drawn, cfg.evolve.interior, model, init);
    } else if (cfg.evolve.model == Model::reflected_chamber) {
      Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(cfg.chamber.m, cfg.evolve.start.a,
                                                     cfg.evolve.start.b);
      for (Eigen::Index i = 0; i < x.size(); ++i)
        x[i] = fold_reflect(x[i], cfg.chamber.radius);
      std::sort(x.data(), x.data() + x.size());
      init.positions = x;
    } else {
      init.positions = Eigen::VectorXd::LinSpaced(cfg.evolve.n, cfg.evolve.start.a,
                                                  cfg.evolve.start.b);
    }

    const TrajectoryRecord rec =
        evolve(model, init, cfg.policy, cfg.evolve.horizon, cfg.evolve.snapshot_every,
               cfg.seed.with_stream(cfg.seed.stream + 2 * k + 1),
               EscapePolicy::flag_and_stop);
    save_trajectory(root / "trajectories" / ("run" + std::to_string(k)), rec);
    rows[k] = std::to_string(k) + "," +
              (rec.status == RunStatus::completed ? "completed" : "escaped") + "," +
              std::to_string(rec.snapshots.size()) + "," + num(rec.final.time) + "," +
              num(rec.escape_time) + "\n";
  });

  std::string csv = "run,status,snapshots,final_time,escape_time\n";
  for (const std::string& r : rows) {
    if (r.find(",escaped,") != std::string::npos) ++escaped;
    csv += r;
  }
  write_text(root / "results" / "runs.csv", csv);
  out << "evolved " << cfg.replicas << " trajectories of " << to_string(cfg.evolve.model)
      << " to t=" << num(cfg.evolve.horizon) << " (" << escaped << " escaped)\n";
}

std::vector<PointConfiguration> load_jsonl(const fs::path& p) {
  std::ifstream is(p);
  require(is.good(), ErrorCode::io_error, "cannot open " + p.string());
  std::vector<PointConfiguration> cfgs;
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) cfgs.push_back(config_from_json_line(line));
  require(!cfgs.empty(), ErrorCode::io_error, "no configurations in " + p.string());
  return cfgs;
}

std::vector<TrajectoryRecord> load_runs(const fs::path& dir) {
  std::vector<TrajectoryRecord> recs;
  for (std::size_t k = 0;; ++k) {
    const fs::path p = dir / ("run" + std::to_string(k));
    if (!fs::exists(p / "metadata.json")) break;
    recs.push_back(load_trajectory(p));
  }
  if (recs.empty() && fs::exists(dir / "metadata.json"))
    recs.push_back(load_trajectory(dir));
  require(!recs.empty(), ErrorCode::io_error,
          "no trajectory records under " + dir.string());
  return recs;
}

void do_analyze(const ExperimentConfig& cfg, const fs::path& root, std::ostream& out) {
  const AnalyzeConfig& a = cfg.analyze;
  const fs::path results = root / "results";
  auto need = [&](bool ok, const char* field, const char* msg) {
    if (!ok) throw ConfigError(field, 0, msg);
  };

  if (a.observable == "one-point") {
    write_curve(results, "one_point", estimate_one_point(load_jsonl(a.input), a.bins));
  } else if (a.observable == "two-point") {
    need(!a.separations.empty(), "analyze.separations", "required for two-point");
    write_curve(results, "two_point",
                estimate_two_point(load_jsonl(a.input), a.separations, a.halfwidth));
  } else if (a.observable == "counting-variance") {
    need(!a.radii.empty(), "analyze.radii", "required for counting-variance");
    write_curve(results, "counting_variance",
                counting_variance_curve(load_jsonl(a.input), a.radii));
  } else if (a.observable == "rigidity") {
    need(!a.radii.empty(), "analyze.radii", "taper widths required for rigidity");
    const RigidityResult rr = rigidity_statistic(load_jsonl(a.input), a.window, a.radii);
    std::string csv = "taper_width,unexplained\n";
    for (std::size_t i = 0; i < rr.taper_widths.size(); ++i)
      csv += num(rr.taper_widths[i]) + "," + num(rr.unexplained[i]) + "\n";
    write_text(results / "rigidity.csv", csv);
    nlohmann::json j;
    j["taper_widths"] = rr.taper_widths;
    j["unexplained"] = rr.unexplained;
    j["var_count"] = rr.var_count;
    j["n"] = rr.n;
    write_text(results / "rigidity.json", j.dump(2) + "\n");
  } else if (a.observable == "msd") {
    need(!a.times.empty(), "analyze.times", "required for msd");
    const std::vector<TrajectoryRecord> recs = load_runs(a.input);
    write_curve(results, "msd", tagged_msd(recs, a.tag, a.times));
  } else if (a.observable == "autocorrelation") {
    const TrajectoryRecord rec = load_runs(a.input).front();
    const ObservableSpec spec{ObservableKind::count_in_window, a.window, {}};
    std::vector<double> series;
    series.reserve(rec.snapshots.size());
    for (const Snapshot& s : rec.snapshots)
      series.push_back(eval_observable(
          spec, std::span<const double>(s.positions.data(),
                                        static_cast<std::size_t>(s.positions.size()))));
    require(series.size() >= 4, ErrorCode::invalid_argument,
            "too few snapshots for autocorrelation");
    const std::size_t max_lag =
        std::min<std::size_t>(static_cast<std::size_t>(a.max_lag), series.size() - 1);
    write_curve(results, "autocorrelation", autocorrelation_curve(series, max_lag));
  } else {
    throw ConfigError("analyze.observable", 0,
                      "unknown observable '" + a.observable +
                          "' (expected one-point, two-point, counting-variance, "
                          "rigidity, msd, or autocorrelation)");
  }
  out << "analyzed " << a.input << " -> " << (results / a.observable).string() << "\n";
}

// mirrors verification output to the caller's stream and the report file
class TeeBuf : public std::streambuf {
 public:
  TeeBuf(std::streambuf* a, std::streambuf* b) : a_(a), b_(b) {}

 protected:
  int overflow(int c) override {
    if (c == traits_type::eof()) return traits_type::not_eof(c);
    a_->sputc(traits_type::to_char_type(c));
    b_->sputc(traits_type::to_char_type(c));
    return c;
  }
  int sync() override {
    a_->pubsync();
    b_->pubsync();
    return 0;
  }

 private:
  std::streambuf* a_;
  std::streambuf* b_;
};

int do_verify(const ExperimentConfig& cfg, const fs::path& root, std::ostream& out,
              std::chrono::steady_clock::time_point t0) {
  const fs::path results = root / "results";
  const char* lvl = to_string(cfg.verify_level);

  // append-only: number the report after the existing ones
  int k = 0;
  auto report_path = [&] {
    return results / ("verify_" + std::string(lvl) + "_" + std::to_string(k) + ".txt");
  };
  while (fs::exists(report_path())) ++k;

  std::ofstream report(report_path(), std::ios::binary);
  require(report.good(), ErrorCode::io_error, "cannot open " + report_path().string());
  TeeBuf tee(report.rdbuf(), out.rdbuf());
  std::ostream log(&tee);

  const VerifyReport rep = run_verification(cfg.verify_level, log);

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(results / ("verify_" + std::string(lvl) + "_" + std::to_string(k) +
                            ".manifest.json"),
                 cfg, wall);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"dysonlab: interacting-diffusion simulation and verification"};
  std::string config_path, out_dir, resume_dir, level_s;
  std::uint64_t seed_override = 0;
  double horizon = 0.0;

  app.add_option("--config", config_path, "experiment config file");
  auto* opt_seed = app.add_option("--seed", seed_override, "override the config seed");
  auto* opt_out = app.add_option("--out", out_dir, "override the output directory");
  app.add_option("--resume", resume_dir, "trajectory directory to continue");
  auto* opt_horizon = app.add_option(
      "--horizon", horizon, "additional time for --resume, or evolve horizon override");
  auto* opt_level = app.add_option("--verify-level", level_s, "verification depth")
                        ->check(CLI::IsMember({"smoke", "full"}));

  std::vector<std::string> storage = args;
  std::vector<char*> argv;
  argv.reserve(storage.size() + 1);
  std::string prog = "dysonlab";
  argv.push_back(prog.data());
  for (std::string& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "argument error: " << e.what() << "\n";
    return 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (!resume_dir.empty()) {
      if (!config_path.empty())
        throw ConfigError("--resume", 0, "mutually exclusive with --config");
      if (opt_horizon->count() && !(std::isfinite(horizon) && horizon >= 0.0))
        throw ConfigError("--horizon", 0, "must be finite and nonnegative");
      const double additional = opt_horizon->count() ? horizon : 0.0;

      const TrajectoryRecord rec = load_trajectory(resume_dir);
      const TrajectoryRecord cont = resume(rec, additional, EscapePolicy::flag_and_stop);
      const fs::path dest = opt_out->count() ? fs::path(out_dir) : fs::path(resume_dir);
      save_trajectory(dest, cont);
      out << "resumed " << resume_dir << " by " << num(additional) << " to t="
          << num(cont.final.time) << " -> " << dest.string() << "\n";
      return 0;
    }

    if (config_path.empty()) {
      err << "config error: one of --config or --resume is required\n";
      return 2;
    }
    ExperimentConfig cfg = load_config(config_path);
    if (opt_seed->count()) cfg.seed.seed = seed_override;
    if (opt_out->count()) cfg.output_dir = out_dir;
    if (opt_level->count())
      cfg.verify_level = level_s == "full" ? VerifyLevel::full : VerifyLevel::smoke;
    if (opt_horizon->count()) cfg.evolve.horizon = horizon;
    cfg.validate();

    const fs::path root = cfg.output_dir;
    fs::create_directories(root / "results");

    int rc = 0;
    switch (cfg.experiment) {
      case ExperimentKind::sample: do_sample(cfg, root, out); break;
      case ExperimentKind::evolve: do_evolve(cfg, root, out); break;
      case ExperimentKind::analyze: do_analyze(cfg, root, out); break;
      case ExperimentKind::verify: return do_verify(cfg, root, out, t0);
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(root / "manifest.json", cfg, wall);
    return rc;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SimError& e) {
    err << "runtime error [" << module_of(e.code()) << "]: " << e.what();
    if (e.when() >= 0.0) err << " at t=" << num(e.when());
    err << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dysonlab
