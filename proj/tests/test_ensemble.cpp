#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <string>
#include <vector>

#include "dysonlab/ensemble.hpp"

using namespace dysonlab;

namespace {

struct ThreadsEnvGuard {
  std::string saved;
  bool had = false;
  ThreadsEnvGuard() {
    if (const char* v = std::getenv("DYSONLAB_THREADS")) {
      saved = v;
      had = true;
    }
  }
  ~ThreadsEnvGuard() {
    if (had)
      setenv("DYSONLAB_THREADS", saved.c_str(), 1);
    else
      unsetenv("DYSONLAB_THREADS");
  }
};

}  // namespace

TEST_CASE("the worker count honors the environment override") {
  ThreadsEnvGuard guard;
  setenv("DYSONLAB_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  setenv("DYSONLAB_THREADS", "0", 1);
  CHECK(worker_count() == 1);  // clamped
  unsetenv("DYSONLAB_THREADS");
  CHECK(worker_count() >= 1);
}

TEST_CASE("parallel for visits every index exactly once") {
  ThreadsEnvGuard guard;
  setenv("DYSONLAB_THREADS", "4", 1);

  const std::size_t n = 1000;
  std::vector<std::atomic<int>> visits(n);
  for (auto& v : visits) v.store(0);
  parallel_for(n, [&](std::size_t i) { visits[i].fetch_add(1); });
  bool once = true;
  for (const auto& v : visits) once &= (v.load() == 1);
  CHECK(once);

  // empty ranges are a no-op
  parallel_for(0, [&](std::size_t) { visits[0].fetch_add(1); });
  CHECK(visits[0].load() == 1);
}
