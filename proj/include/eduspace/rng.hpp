#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace eduspace {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + (stream << 1));
  splitmix64(s);
  return s;
}

/// Small deterministic generator. Identical output on every platform; a
/// per-entity stream is derived from (seed, index) so generation order does
/// not depend on scheduling.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) { splitmix64(state_); }

  static Rng stream(uint64_t seed, uint64_t index) { return Rng(mix_seed(seed, index)); }

  uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  uint64_t below(uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

  double normal() {
    // Box-Muller, one value per call; u1 kept away from 0.
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // index drawn with probability proportional to weights[i]; weights need not sum to 1
  int weighted(const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    double acc = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  // first m entries of a Fisher-Yates shuffle of 0..n-1
  std::vector<int64_t> sample_indices(int64_t n, int64_t m) {
    if (m > n) m = n;
    std::vector<int64_t> idx(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
    for (int64_t i = 0; i < m; ++i) {
      int64_t j = i + static_cast<int64_t>(below(static_cast<uint64_t>(n - i)));
      std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
    }
    idx.resize(static_cast<size_t>(m));
    return idx;
  }

 private:
  uint64_t state_;
};

}  // namespace eduspace
