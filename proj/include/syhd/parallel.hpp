#pragma once

// Deterministic data parallelism: the index space is split into fixed chunks
// whose boundaries do not depend on the worker count, and workers write only
// to their own indices, so results are identical for any thread count.

#include <cstdlib>
#include <thread>
#include <vector>

namespace syhd {

inline unsigned worker_count() {
  if (const char* env = std::getenv("SYHD_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = worker_count();
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([n, w, workers, &fn] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace syhd
