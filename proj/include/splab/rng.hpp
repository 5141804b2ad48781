#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace splab {

/// Counter-based SplitMix64 generator.
///
/// Draw number `c` (0-based) from key `k` is
///
///     z = k + (c + 1) * 0x9E3779B97F4A7C15            (mod 2^64)
///     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///     out = z ^ (z >> 31)
///
/// which is exactly the reference SplitMix64 sequence seeded with `k`.
/// Independent streams use the key `mix(seed ^ mix(stream + 0x632BE59BD9B4E019))`.
/// Uniform doubles take the top 53 bits; normals use Box-Muller on two
/// consecutive uniforms (the sine branch is discarded), so every derived
/// value depends only on the documented integer sequence.
class Rng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(stream == 0 ? seed : mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL))) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Value at an arbitrary counter position without advancing.
  std::uint64_t at(std::uint64_t counter) const noexcept {
    return mix(key_ + (counter + 1) * kGamma);
  }

  std::uint64_t next_u64() noexcept { return at(counter_++); }

  /// Uniform in [0, 1).
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound) by rejection (bound > 0).
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  double normal() noexcept {
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t counter() const noexcept { return counter_; }
  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace splab
