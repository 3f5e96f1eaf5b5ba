#pragma once

#include <algorithm>
#include <cstdlib>
#include <future>
#include <string>
#include <thread>
#include <vector>

namespace folded {

// FOLDED_MAPS_THREADS caps the worker count; unset means hardware concurrency.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FOLDED_MAPS_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(std::min<long>(v, 256));
    } catch (...) {
    }
  }
  return hw;
}

// Runs body(i) for i in [0, n). Each index is written by exactly one task, so
// results are identical whatever the worker count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const unsigned workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::future<void>> jobs;
  jobs.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    jobs.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t i = t; i < n; i += workers) body(i);
    }));
  }
  for (auto& j : jobs) j.get();
}

}  // namespace folded
