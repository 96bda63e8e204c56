#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace dsfm {

// Worker count: DSFM_THREADS when set (clamped to [1, 64]), else the
// hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("DSFM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return std::min(n, 64);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 64u));
}

// Static block partition of [begin, end) across worker threads. fn must be
// safe to run concurrently on disjoint indices. Exceptions from workers are
// rethrown on the caller (first one wins).
inline void parallel_for(int begin, int end, const std::function<void(int)>& fn,
                         int min_grain = 1) {
  const int range = end - begin;
  if (range <= 0) return;
  int workers = std::min(thread_count(), (range + min_grain - 1) / min_grain);
  if (workers <= 1) {
    for (int j = begin; j < end; ++j) fn(j);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const int chunk = (range + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    const int lo = begin + t * chunk;
    const int hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([&, t, lo, hi] {
      try {
        for (int j = lo; j < hi; ++j) fn(j);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace dsfm
