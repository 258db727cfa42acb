#pragma once

#include <cstddef>
#include <functional>

namespace dysonlab {

// worker count: DYSONLAB_THREADS when set (clamped to >= 1), otherwise the
// hardware concurrency
int worker_count();

// runs fn(0..n-1) across workers; replicas own disjoint output slots and
// distinct RNG streams, so results are independent of scheduling
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace dysonlab
