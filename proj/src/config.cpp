#include "dysonlab/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

namespace dysonlab {

namespace {

// --- minimal TOML-style reader: [section], key = value, # comments ---------

struct RawValue {
  std::variant<double, bool, std::string, std::vector<double>> v;
  int line = 0;
  mutable bool used = false;
};

using RawTable = std::map<std::string, RawValue>;

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

bool parse_number(const std::string& t, double& out) {
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

RawValue parse_value(const std::string& field, const std::string& text, int line) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError(field, line, "missing value");
  RawValue rv;
  rv.line = line;
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"')
      throw ConfigError(field, line, "unterminated string");
    rv.v = t.substr(1, t.size() - 2);
    return rv;
  }
  if (t == "true" || t == "false") {
    rv.v = (t == "true");
    return rv;
  }
  if (t.front() == '[') {
    if (t.back() != ']') throw ConfigError(field, line, "unterminated array");
    std::vector<double> xs;
    std::string body = t.substr(1, t.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      double x;
      if (!parse_number(item, x))
        throw ConfigError(field, line, "array elements must be numbers");
      xs.push_back(x);
    }
    rv.v = std::move(xs);
    return rv;
  }
  double x;
  if (parse_number(t, x)) {
    rv.v = x;
    return rv;
  }
  throw ConfigError(field, line, "cannot parse value '" + t + "'");
}

struct RawConfig {
  std::map<std::string, RawTable> sections;  // "" = top level

  const RawValue* find(const std::string& sec, const std::string& key) const {
    auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.used = true;
    return &k->second;
  }
};

RawConfig read_raw(const std::string& text) {
  RawConfig raw;
  std::stringstream ss(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(line, lineno, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      raw.sections[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line, lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(line, lineno, "empty key");
    const std::string field = section.empty() ? key : section + "." + key;
    auto& table = raw.sections[section];
    if (table.count(key))
      throw ConfigError(field, lineno, "duplicate key");
    table[key] = parse_value(field, line.substr(eq + 1), lineno);
  }
  return raw;
}

// --- typed extraction ------------------------------------------------------

std::string path_of(const std::string& sec, const std::string& key) {
  return sec.empty() ? key : sec + "." + key;
}

double get_number(const RawConfig& raw, const std::string& sec,
                  const std::string& key, double def) {
  const RawValue* rv = raw.find(sec, key);
  if (!rv) return def;
  if (const double* x = std::get_if<double>(&rv->v)) return *x;
  throw ConfigError(path_of(sec, key), rv->line, "expected a number");
}

long long get_integer(const RawConfig& raw, const std::string& sec,
                      const std::string& key, long long def) {
  const RawValue* rv = raw.find(sec, key);
  if (!rv) return def;
  const double* x = std::get_if<double>(&rv->v);
  if (!x || std::abs(*x - std::llround(*x)) > 1e-9)
    throw ConfigError(path_of(sec, key), rv->line, "expected an integer");
  return std::llround(*x);
}

std::string get_string(const RawConfig& raw, const std::string& sec,
                       const std::string& key, const std::string& def) {
  const RawValue* rv = raw.find(sec, key);
  if (!rv) return def;
  if (const std::string* s = std::get_if<std::string>(&rv->v)) return *s;
  throw ConfigError(path_of(sec, key), rv->line, "expected a string");
}

std::vector<double> get_array(const RawConfig& raw, const std::string& sec,
                              const std::string& key, std::vector<double> def) {
  const RawValue* rv = raw.find(sec, key);
  if (!rv) return def;
  if (const auto* a = std::get_if<std::vector<double>>(&rv->v)) return *a;
  throw ConfigError(path_of(sec, key), rv->line, "expected an array of numbers");
}

Interval get_interval(const RawConfig& raw, const std::string& sec,
                      const std::string& key, Interval def) {
  const RawValue* rv = raw.find(sec, key);
  if (!rv) return def;
  const auto* a = std::get_if<std::vector<double>>(&rv->v);
  if (!a || a->size() != 2)
    throw ConfigError(path_of(sec, key), rv->line, "expected [a, b]");
  return {(*a)[0], (*a)[1]};
}

// cutoff is a positive number or the string "inf"
double get_cutoff(const RawConfig& raw) {
  const RawValue* rv = raw.find("drift", "cutoff");
  if (!rv) return kInf;
  if (const std::string* s = std::get_if<std::string>(&rv->v)) {
    if (*s == "inf") return kInf;
    throw ConfigError("drift.cutoff", rv->line, "expected a number or \"inf\"");
  }
  if (const double* x = std::get_if<double>(&rv->v)) return *x;
  throw ConfigError("drift.cutoff", rv->line, "expected a number or \"inf\"");
}

const char* known_sections[] = {"",       "seed",    "kernel", "sampler",
                                "drift",  "chamber", "policy", "evolve",
                                "analyze"};

void check_unused(const RawConfig& raw) {
  for (const auto& [sec, table] : raw.sections) {
    bool known = false;
    for (const char* k : known_sections) known |= (sec == k);
    if (!known)
      throw ConfigError(sec, table.empty() ? 0 : table.begin()->second.line,
                        "unknown section");
    for (const auto& [key, rv] : table)
      if (!rv.used)
        throw ConfigError(path_of(sec, key), rv.line, "unknown key");
  }
}

template <class T>
T parse_enum(const std::string& field, const std::string& s,
             std::initializer_list<std::pair<const char*, T>> table) {
  for (const auto& [name, value] : table)
    if (s == name) return value;
  std::string options;
  for (const auto& [name, value] : table) {
    if (!options.empty()) options += ", ";
    options += name;
  }
  throw ConfigError(field, 0, "got '" + s + "', expected one of: " + options);
}

void append_kv(std::string& out, const char* key, const std::string& v) {
  out += key;
  out += " = ";
  out += v;
  out += "\n";
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string arr(const std::vector<double>& xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += num(xs[i]);
  }
  return s + "]";
}

std::string arr(const Interval& w) { return arr(std::vector<double>{w.a, w.b}); }

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  const RawConfig raw = read_raw(text);
  ExperimentConfig c;

  c.experiment = parse_enum<ExperimentKind>(
      "experiment", get_string(raw, "", "experiment", "sample"),
      {{"sample", ExperimentKind::sample},
       {"evolve", ExperimentKind::evolve},
       {"analyze", ExperimentKind::analyze},
       {"verify", ExperimentKind::verify}});
  c.output_dir = get_string(raw, "", "output_dir", c.output_dir);
  c.replicas = static_cast<std::size_t>(get_integer(raw, "", "replicas", 100));
  c.verify_level = parse_enum<VerifyLevel>(
      "verify_level", get_string(raw, "", "verify_level", "smoke"),
      {{"smoke", VerifyLevel::smoke}, {"full", VerifyLevel::full}});

  c.seed.seed = static_cast<std::uint64_t>(get_integer(raw, "seed", "seed", 1));
  c.seed.stream = static_cast<std::uint64_t>(get_integer(raw, "seed", "stream", 0));

  c.kernel.rho = get_number(raw, "kernel", "rho", c.kernel.rho);

  c.sampler.kind = parse_enum<SamplerKind>(
      "sampler.kind", get_string(raw, "sampler", "kind", "gue"),
      {{"gue", SamplerKind::gue}, {"dpp", SamplerKind::dpp},
       {"poisson", SamplerKind::poisson}});
  c.sampler.n = static_cast<int>(get_integer(raw, "sampler", "n", c.sampler.n));
  c.sampler.window = get_interval(raw, "sampler", "window", c.sampler.window);
  c.sampler.mesh = static_cast<int>(get_integer(raw, "sampler", "mesh", 0));
  c.sampler.intensity = get_number(raw, "sampler", "intensity", 1.0);

  c.drift.beta = get_number(raw, "drift", "beta", 2.0);
  c.drift.cutoff = get_cutoff(raw);
  c.drift.confinement = parse_enum<DriftSpec::Confinement>(
      "drift.confinement", get_string(raw, "drift", "confinement", "none"),
      {{"none", DriftSpec::Confinement::none},
       {"as-written", DriftSpec::Confinement::as_written}});

  c.chamber.radius = get_number(raw, "chamber", "radius", 1.0);
  c.chamber.m = static_cast<int>(get_integer(raw, "chamber", "m", 2));

  c.policy.dt = get_number(raw, "policy", "dt", c.policy.dt);
  c.policy.dt_min = get_number(raw, "policy", "dt_min", c.policy.dt_min);
  c.policy.max_halvings =
      static_cast<int>(get_integer(raw, "policy", "max_halvings", 20));

  const std::string model = get_string(raw, "evolve", "model", "dyson-finite");
  c.evolve.model = parse_enum<Model>("evolve.model", model,
                                     {{"dyson-finite", Model::dyson_finite},
                                      {"truncated-isde", Model::truncated_isde},
                                      {"reflected-chamber", Model::reflected_chamber}});
  c.evolve.n = static_cast<int>(get_integer(raw, "evolve", "n", c.evolve.n));
  c.evolve.horizon = get_number(raw, "evolve", "horizon", c.evolve.horizon);
  c.evolve.snapshot_every =
      get_number(raw, "evolve", "snapshot_every", c.evolve.snapshot_every);
  c.evolve.start = get_interval(raw, "evolve", "start", c.evolve.start);
  c.evolve.interior = get_interval(raw, "evolve", "interior", c.evolve.interior);

  c.analyze.input = get_string(raw, "analyze", "input", "");
  c.analyze.observable = get_string(raw, "analyze", "observable", "one-point");
  c.analyze.window = get_interval(raw, "analyze", "window", c.analyze.window);
  c.analyze.bins = static_cast<int>(get_integer(raw, "analyze", "bins", 20));
  c.analyze.halfwidth = get_number(raw, "analyze", "halfwidth", 0.125);
  c.analyze.separations = get_array(raw, "analyze", "separations", {});
  c.analyze.radii = get_array(raw, "analyze", "radii", {});
  c.analyze.coeffs = get_array(raw, "analyze", "coeffs", {});
  c.analyze.max_lag = static_cast<int>(get_integer(raw, "analyze", "max_lag", 50));
  c.analyze.tag = static_cast<int>(get_integer(raw, "analyze", "tag", 0));
  c.analyze.times = get_array(raw, "analyze", "times", {});

  check_unused(raw);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is.good()) throw ConfigError(path.string(), 0, "cannot open config file");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

void ExperimentConfig::validate() const {
  auto check = [](bool ok, const char* field, const std::string& msg) {
    if (!ok) throw ConfigError(field, 0, msg);
  };
  check(replicas >= 1, "replicas", "must be at least 1");
  check(!output_dir.empty(), "output_dir", "must be nonempty");
  check(std::isfinite(kernel.rho) && kernel.rho > 0.0, "kernel.rho",
        "must be finite and positive");
  check(sampler.window.valid(), "sampler.window", "must satisfy a < b");
  check(sampler.n >= 1, "sampler.n", "must be positive");
  check(sampler.mesh >= 0, "sampler.mesh", "must be nonnegative (0 = auto)");
  check(std::isfinite(sampler.intensity) && sampler.intensity > 0.0,
        "sampler.intensity", "must be finite and positive");
  check(std::isfinite(drift.beta) && drift.beta > 0.0, "drift.beta",
        "must be finite and positive");
  check(drift.cutoff > 0.0, "drift.cutoff", "must be positive");
  check(std::isfinite(chamber.radius) && chamber.radius > 0.0, "chamber.radius",
        "must be finite and positive");
  check(chamber.m >= 1, "chamber.m", "must be at least 1");
  check(std::isfinite(policy.dt) && policy.dt > 0.0, "policy.dt",
        "must be finite and positive");
  check(std::isfinite(policy.dt_min) && policy.dt_min > 0.0 &&
            policy.dt_min <= policy.dt,
        "policy.dt_min", "must satisfy 0 < dt_min <= dt");
  check(policy.max_halvings >= 0, "policy.max_halvings", "must be nonnegative");

  if (experiment == ExperimentKind::evolve) {
    check(std::isfinite(evolve.horizon) && evolve.horizon >= 0.0, "evolve.horizon",
          "must be finite and nonnegative");
    check(std::isfinite(evolve.snapshot_every) && evolve.snapshot_every > 0.0,
          "evolve.snapshot_every", "must be positive");
    check(evolve.n >= 1, "evolve.n", "must be positive");
    check(evolve.start.valid(), "evolve.start", "must satisfy a < b");
    if (evolve.model == Model::truncated_isde) {
      check(evolve.interior.valid(), "evolve.interior", "must satisfy a < b");
      check(sampler.window.contains(evolve.interior), "evolve.interior",
            "must sit inside sampler.window");
      check(std::isfinite(drift.cutoff), "drift.cutoff",
            "truncated-isde requires a finite cutoff");
    }
    if (evolve.model == Model::dyson_finite)
      check(std::isinf(drift.cutoff), "drift.cutoff",
            "dyson-finite requires cutoff = \"inf\"");
  }
  if (experiment == ExperimentKind::analyze) {
    check(!analyze.input.empty(), "analyze.input", "must name an input artifact");
    check(analyze.bins >= 1, "analyze.bins", "must be positive");
    check(analyze.halfwidth > 0.0, "analyze.halfwidth", "must be positive");
    check(analyze.max_lag >= 1, "analyze.max_lag", "must be positive");
    check(analyze.tag >= 0, "analyze.tag", "must be nonnegative");
  }
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out;
  append_kv(out, "experiment", quoted(to_string(c.experiment)));
  append_kv(out, "output_dir", quoted(c.output_dir));
  append_kv(out, "replicas", std::to_string(c.replicas));
  append_kv(out, "verify_level", quoted(to_string(c.verify_level)));

  out += "\n[seed]\n";
  append_kv(out, "seed", std::to_string(c.seed.seed));
  append_kv(out, "stream", std::to_string(c.seed.stream));

  out += "\n[kernel]\n";
  append_kv(out, "rho", num(c.kernel.rho));

  out += "\n[sampler]\n";
  append_kv(out, "kind", quoted(to_string(c.sampler.kind)));
  append_kv(out, "n", std::to_string(c.sampler.n));
  append_kv(out, "window", arr(c.sampler.window));
  append_kv(out, "mesh", std::to_string(c.sampler.mesh));
  append_kv(out, "intensity", num(c.sampler.intensity));

  out += "\n[drift]\n";
  append_kv(out, "beta", num(c.drift.beta));
  append_kv(out, "cutoff",
            std::isinf(c.drift.cutoff) ? quoted("inf") : num(c.drift.cutoff));
  append_kv(out, "confinement",
            quoted(c.drift.confinement == DriftSpec::Confinement::none
                       ? "none"
                       : "as-written"));

  out += "\n[chamber]\n";
  append_kv(out, "radius", num(c.chamber.radius));
  append_kv(out, "m", std::to_string(c.chamber.m));

  out += "\n[policy]\n";
  append_kv(out, "dt", num(c.policy.dt));
  append_kv(out, "dt_min", num(c.policy.dt_min));
  append_kv(out, "max_halvings", std::to_string(c.policy.max_halvings));

  out += "\n[evolve]\n";
  append_kv(out, "model", quoted(to_string(c.evolve.model)));
  append_kv(out, "n", std::to_string(c.evolve.n));
  append_kv(out, "horizon", num(c.evolve.horizon));
  append_kv(out, "snapshot_every", num(c.evolve.snapshot_every));
  append_kv(out, "start", arr(c.evolve.start));
  append_kv(out, "interior", arr(c.evolve.interior));

  out += "\n[analyze]\n";
  append_kv(out, "input", quoted(c.analyze.input));
  append_kv(out, "observable", quoted(c.analyze.observable));
  append_kv(out, "window", arr(c.analyze.window));
  append_kv(out, "bins", std::to_string(c.analyze.bins));
  append_kv(out, "halfwidth", num(c.analyze.halfwidth));
  append_kv(out, "separations", arr(c.analyze.separations));
  append_kv(out, "radii", arr(c.analyze.radii));
  append_kv(out, "coeffs", arr(c.analyze.coeffs));
  append_kv(out, "max_lag", std::to_string(c.analyze.max_lag));
  append_kv(out, "tag", std::to_string(c.analyze.tag));
  append_kv(out, "times", arr(c.analyze.times));
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  return fnv1a64(serialize_config(c));
}

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::sample: return "sample";
    case ExperimentKind::evolve: return "evolve";
    case ExperimentKind::analyze: return "analyze";
    case ExperimentKind::verify: return "verify";
  }
  return "unknown";
}

const char* to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::gue: return "gue";
    case SamplerKind::dpp: return "dpp";
    case SamplerKind::poisson: return "poisson";
  }
  return "unknown";
}

const char* to_string(VerifyLevel k) {
  return k == VerifyLevel::smoke ? "smoke" : "full";
}

}  // namespace dysonlab
