#pragma once

#include <cmath>
#include <cstdint>

namespace dicelab {

/// Generator name recorded in every randomized report.
inline constexpr const char* kRngAlgorithm = "splitmix64";

/// Counter-based splitmix64 stream: draw i is a fixed 64-bit mix of
/// seed + (i+1) * 0x9E3779B97F4A7C15. Runs with several workers give worker
/// w the stream seeded seed + w, so results depend only on (seed, workers),
/// never on scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double strictly inside (0,1): 53-bit mantissa nudged off 0.
  double next_unit() { return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), bound >= 1. Multiply-shift mapping; the
  /// bias of at most bound/2^64 is far below Monte Carlo resolution.
  std::uint64_t next_below(std::uint64_t bound) {
    return std::uint64_t((static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  /// Standard normal pair (Box-Muller).
  void next_normal_pair(double& a, double& b) {
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    a = radius * std::cos(angle);
    b = radius * std::sin(angle);
  }

 private:
  std::uint64_t state_;
};

}  // namespace dicelab
