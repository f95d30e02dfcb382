#include "sentidrop/parallel.hpp"

#include <atomic>

namespace sentidrop::par {

namespace {
std::atomic<int> g_max_threads{0};
}

int max_threads() {
  int n = g_max_threads.load();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

}  // namespace sentidrop::par
