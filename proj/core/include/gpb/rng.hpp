#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "gpb/errors.hpp"

namespace gpb {

// Deterministic pseudo-random stream, fully specified by its constants so
// other implementations can reproduce it bit for bit.
//
// Generator: SplitMix64. State advances by the additive constant
// 0x9E3779B97F4A7C15; output mixing multiplies by 0xBF58476D1CE4E5B9 and
// 0x94D049BB133111EB with xor-shifts 30, 27 and 31.
//
// Derived draws (all consume a documented number of raw 64-bit outputs):
//   uniform()  — one output; top 53 bits scaled by 2^-53, range [0, 1).
//   gaussian() — two outputs via the Box-Muller transform
//                z0 = sqrt(-2 ln u1) cos(2 pi u2), u1 in (0, 1]; the sine
//                companion is cached and returned by the next call.
//   below(n)   — one output; 128-bit multiply-high maps it to {0, ..., n-1}.
//
// Stream identifier recorded in experiment summaries: "splitmix64-boxmuller/v1".
class SplitMix64 {
 public:
  static constexpr const char* kStreamName = "splitmix64-boxmuller/v1";

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 significant bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal deviate; every second call is served from the cache.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the logarithm finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Uniform integer in {0, ..., n-1} via multiply-high (no rejection loop).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw InvalidParameter("SplitMix64::below: n must be positive");
    const auto wide = static_cast<unsigned __int128>(next_u64()) *
                      static_cast<unsigned __int128>(n);
    return static_cast<std::uint64_t>(wide >> 64);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gpb
