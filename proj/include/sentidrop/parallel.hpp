#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace sentidrop::par {

// Global worker cap, settable from the CLI (--threads). 0 means "use the
// hardware count". Changing it must never change results, only timing:
// callers write to disjoint slots and reduce in fixed order.
int max_threads();
void set_max_threads(int n);

template <typename Fn>
void parallel_for(size_t begin, size_t end, Fn&& fn, int threads = 0) {
  if (end <= begin) return;
  size_t n = end - begin;
  int workers = threads > 0 ? threads : max_threads();
  if (workers > static_cast<int>(n)) workers = static_cast<int>(n);
  if (workers <= 1) {
    for (size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  size_t chunk = (n + static_cast<size_t>(workers) - 1) / static_cast<size_t>(workers);
  for (int w = 0; w < workers; ++w) {
    size_t lo = begin + chunk * static_cast<size_t>(w);
    size_t hi = lo + chunk < end ? lo + chunk : end;
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace sentidrop::par
