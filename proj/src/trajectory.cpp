#include "dysonlab/trajectory.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "snapshot files are little-endian");

namespace dysonlab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<char> encode_snapshot(const Snapshot& s) {
  const std::uint64_t n = static_cast<std::uint64_t>(s.positions.size());
  std::vector<char> buf(sizeof(double) + sizeof(std::uint64_t) +
                        n * sizeof(double) + sizeof(std::uint64_t));
  char* p = buf.data();
  std::memcpy(p, &s.time, sizeof(double));
  p += sizeof(double);
  std::memcpy(p, &n, sizeof(std::uint64_t));
  p += sizeof(std::uint64_t);
  std::memcpy(p, s.positions.data(), n * sizeof(double));
  p += n * sizeof(double);
  std::memcpy(p, &s.rng_counter, sizeof(std::uint64_t));
  return buf;
}

Snapshot decode_snapshot(const std::vector<char>& buf) {
  require(buf.size() >= 2 * sizeof(std::uint64_t) + sizeof(double),
          ErrorCode::checksum_mismatch, "snapshot record truncated");
  Snapshot s;
  const char* p = buf.data();
  std::memcpy(&s.time, p, sizeof(double));
  p += sizeof(double);
  std::uint64_t n = 0;
  std::memcpy(&n, p, sizeof(std::uint64_t));
  p += sizeof(std::uint64_t);
  require(buf.size() == sizeof(double) + sizeof(std::uint64_t) +
                            n * sizeof(double) + sizeof(std::uint64_t),
          ErrorCode::checksum_mismatch, "snapshot record length mismatch");
  s.positions.resize(static_cast<Eigen::Index>(n));
  std::memcpy(s.positions.data(), p, n * sizeof(double));
  p += n * sizeof(double);
  std::memcpy(&s.rng_counter, p, sizeof(std::uint64_t));
  return s;
}

json interval_to_json(const Interval& w) { return json::array({w.a, w.b}); }

Interval interval_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

void save_trajectory(const fs::path& dir, const TrajectoryRecord& rec) {
  std::error_code ec;
  fs::create_directories(dir, ec);

  json meta;
  meta["schema"] = kSchemaVersion;
  meta["code_version"] = kVersion;
  meta["model"] = to_string(rec.model.model);
  meta["drift"] = {{"beta", rec.model.drift.beta},
                   {"cutoff", std::isinf(rec.model.drift.cutoff)
                                  ? json("inf")
                                  : json(rec.model.drift.cutoff)},
                   {"confinement",
                    rec.model.drift.confinement == DriftSpec::Confinement::none
                        ? "none"
                        : "as-written"}};
  meta["chamber"] = {{"radius", rec.model.chamber.radius}, {"m", rec.model.chamber.m}};
  if (rec.model.model == Model::truncated_isde) {
    meta["interior_window"] = interval_to_json(rec.model.interior_window);
    meta["exterior_window"] = interval_to_json(rec.model.exterior.window);
    meta["exterior_points"] = std::vector<double>(
        rec.model.exterior.points.data(),
        rec.model.exterior.points.data() + rec.model.exterior.size());
  }
  meta["policy"] = {{"dt", rec.policy.dt},
                    {"dt_min", rec.policy.dt_min},
                    {"max_halvings", rec.policy.max_halvings}};
  meta["seed"] = {{"seed", rec.seed.seed}, {"stream", rec.seed.stream}};
  meta["snapshot_every"] = rec.snapshot_every;
  meta["horizon"] = rec.horizon;
  meta["status"] = rec.status == RunStatus::completed ? "completed" : "escaped";
  meta["escape_time"] = rec.escape_time;
  meta["snapshot_count"] = rec.snapshots.size();

  {
    std::ofstream os(dir / "metadata.json");
    require(os.good(), ErrorCode::io_error, "cannot write metadata.json");
    os << meta.dump(2) << "\n";
  }

  std::ofstream bin(dir / "snapshots.bin", std::ios::binary);
  std::ofstream idx(dir / "index.csv");
  require(bin.good() && idx.good(), ErrorCode::io_error, "cannot write trajectory");
  idx << "kind,index,time,offset,length,fnv64\n";
  idx.precision(17);

  std::uint64_t offset = 0;
  auto emit = [&](const char* kind, long long i, const Snapshot& s) {
    const std::vector<char> buf = encode_snapshot(s);
    bin.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(buf.data(), buf.size())));
    idx << kind << "," << i << "," << s.time << "," << offset << "," << buf.size()
        << "," << hex << "\n";
    offset += buf.size();
  };
  for (std::size_t i = 0; i < rec.snapshots.size(); ++i)
    emit("snap", static_cast<long long>(i), rec.snapshots[i]);
  emit("final", -1, rec.final);
  require(bin.good() && idx.good(), ErrorCode::io_error, "trajectory write failed");
}

TrajectoryRecord load_trajectory(const fs::path& dir) {
  std::ifstream ms(dir / "metadata.json");
  require(ms.good(), ErrorCode::io_error, "cannot read metadata.json");
  json meta = json::parse(ms, nullptr, true);

  TrajectoryRecord rec;
  rec.model.model = model_from_string(meta.at("model").get<std::string>());
  const json& dj = meta.at("drift");
  rec.model.drift.beta = dj.at("beta").get<double>();
  rec.model.drift.cutoff = dj.at("cutoff").is_string() ? kInf : dj.at("cutoff").get<double>();
  rec.model.drift.confinement = dj.at("confinement").get<std::string>() == "none"
                                    ? DriftSpec::Confinement::none
                                    : DriftSpec::Confinement::as_written;
  rec.model.chamber.radius = meta.at("chamber").at("radius").get<double>();
  rec.model.chamber.m = meta.at("chamber").at("m").get<int>();
  if (rec.model.model == Model::truncated_isde) {
    rec.model.interior_window = interval_from_json(meta.at("interior_window"));
    rec.model.exterior.window = interval_from_json(meta.at("exterior_window"));
    const auto pts = meta.at("exterior_points").get<std::vector<double>>();
    rec.model.exterior.points = Eigen::Map<const Eigen::ArrayXd>(pts.data(), pts.size());
  }
  rec.policy.dt = meta.at("policy").at("dt").get<double>();
  rec.policy.dt_min = meta.at("policy").at("dt_min").get<double>();
  rec.policy.max_halvings = meta.at("policy").at("max_halvings").get<int>();
  rec.seed.seed = meta.at("seed").at("seed").get<std::uint64_t>();
  rec.seed.stream = meta.at("seed").at("stream").get<std::uint64_t>();
  rec.snapshot_every = meta.at("snapshot_every").get<double>();
  rec.horizon = meta.at("horizon").get<double>();
  rec.status = meta.at("status").get<std::string>() == "completed"
                   ? RunStatus::completed
                   : RunStatus::escaped;
  rec.escape_time = meta.at("escape_time").get<double>();
  const auto snapshot_count = meta.at("snapshot_count").get<std::size_t>();

  std::ifstream bin(dir / "snapshots.bin", std::ios::binary);
  std::ifstream idx(dir / "index.csv");
  require(bin.good() && idx.good(), ErrorCode::io_error, "cannot read trajectory");

  std::string line;
  std::getline(idx, line);  // header
  bool have_final = false;
  while (std::getline(idx, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kind, tok;
    std::getline(ls, kind, ',');
    std::getline(ls, tok, ',');
    std::getline(ls, tok, ',');
    const double time = std::stod(tok);
    std::getline(ls, tok, ',');
    const std::uint64_t offset = std::stoull(tok);
    std::getline(ls, tok, ',');
    const std::size_t length = std::stoull(tok);
    std::getline(ls, tok, ',');
    const std::uint64_t want = std::stoull(tok, nullptr, 16);

    std::vector<char> buf(length);
    bin.seekg(static_cast<std::streamoff>(offset));
    bin.read(buf.data(), static_cast<std::streamsize>(length));
    require(bin.gcount() == static_cast<std::streamsize>(length),
            ErrorCode::checksum_mismatch, "snapshot record truncated");
    require(fnv1a64(buf.data(), buf.size()) == want, ErrorCode::checksum_mismatch,
            "snapshot checksum mismatch");

    Snapshot s = decode_snapshot(buf);
    require(s.time == time, ErrorCode::checksum_mismatch,
            "index time disagrees with record");
    if (kind == "final") {
      rec.final = std::move(s);
      have_final = true;
    } else {
      rec.snapshots.push_back(std::move(s));
    }
  }
  require(have_final, ErrorCode::checksum_mismatch, "missing final record");
  require(rec.snapshots.size() == snapshot_count, ErrorCode::checksum_mismatch,
          "snapshot count disagrees with metadata");
  return rec;
}

}  // namespace dysonlab
