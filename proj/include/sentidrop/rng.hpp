#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace sentidrop {

// Deterministic counter-based RNG. Every stochastic choice in the project
// flows from one root seed through child() streams, so results are identical
// whether work units run serially or in parallel. Distributions are
// hand-rolled on top of the raw 64-bit stream: standard-library distribution
// objects are implementation-defined and would break cross-build
// reproducibility of frozen test values.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    // splitmix64
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1].
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (cosine branch only; stateless).
  double normal() {
    double u1 = uniform_pos();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Uniform integer in [0, n). Multiply-shift; bias is negligible for the
  // ranges used here and the mapping is fully deterministic.
  uint64_t below(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Knuth's product method; fine for the small rates used here.
  int poisson(double lambda) {
    double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Derives an independent stream. child(a).child(b) != child(b).child(a),
  // which is what lets per-unit streams stay stable as code around them
  // changes.
  Rng child(uint64_t tag) const { return Rng(derive(state_, tag)); }

  static uint64_t derive(uint64_t seed, uint64_t tag) {
    uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (tag + 1));
    Rng r(x);
    r.next_u64();
    return r.next_u64();
  }

 private:
  uint64_t state_;
};

// FNV-1a, used to turn stage names into stream tags and to hash configs.
inline uint64_t fnv1a(std::string_view s, uint64_t h = 0xCBF29CE484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline uint64_t derive_seed(uint64_t seed, std::string_view stage) {
  return Rng::derive(seed, fnv1a(stage));
}

}  // namespace sentidrop
