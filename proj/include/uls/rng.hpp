#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace uls {

/// Deterministic 64-bit generator (splitmix64). Used everywhere randomness is
/// needed so results are identical across platforms and standard-library versions.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Unbiased uniform draw in [0, n), rejection-sampled.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t threshold = (~n + 1) % n;  // = 2^64 mod n
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double next_double() { return double(next() >> 11) * 0x1.0p-53; }

  /// Box-Muller normal draw.
  double gaussian(double mean, double sigma) {
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * r * std::cos(6.283185307179586 * u2);
  }
};

/// Stable per-item seed: fold a string label into a root seed (FNV-1a, then scramble).
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
  std::uint64_t h = 1469598103934665603ULL ^ root;
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return SplitMix64(h).next();
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t n) {
  return SplitMix64(root ^ (0x9e3779b97f4a7c15ULL * (n + 1))).next();
}

}  // namespace uls
