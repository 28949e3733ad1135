#pragma once

#include <cmath>
#include <cstdint>

namespace wsii {

/// Small deterministic generator (splitmix64). Stream content depends only on
/// the seed, not on the standard library, so persisted artifacts reproduce
/// across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  /// Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Standard normal via the Marsaglia polar method (spare discarded).
  double normal() {
    for (;;) {
      const double u = 2.0 * unit() - 1.0;
      const double v = 2.0 * unit() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        return u * std::sqrt(-2.0 * std::log(s) / s);
      }
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace wsii
