#pragma once

#include <filesystem>

#include "dysonlab/dynamics.hpp"

namespace dysonlab {

// on-disk layout of a trajectory directory:
//   metadata.json  - model, policy, seed, horizon, status
//   snapshots.bin  - little-endian records [f64 time][u64 n][f64*n x][u64 rng]
//   index.csv      - kind,index,time,offset,length,fnv64 per record
// every record is checksummed; load verifies and throws checksum-mismatch

void save_trajectory(const std::filesystem::path& dir, const TrajectoryRecord& rec);
TrajectoryRecord load_trajectory(const std::filesystem::path& dir);

}  // namespace dysonlab
