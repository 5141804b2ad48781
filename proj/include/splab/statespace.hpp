#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "splab/instances.hpp"

namespace splab {

/// One configuration packed into the low n bits of a word.
/// Bit i set means spin +1 (or site i occupied); clear means -1 (empty).
struct SpinConfig {
  std::uint64_t bits = 0;
  int n = 0;

  int weight() const noexcept { return __builtin_popcountll(bits); }
  bool get(int i) const noexcept { return (bits >> i) & 1U; }
  /// +1 / -1 spin value of site i.
  int spin(int i) const noexcept { return get(i) ? 1 : -1; }

  /// Characters for sites 0..n-1 in order, e.g. "10" means site 0 set.
  std::string to_string() const;
  static SpinConfig from_string(std::string_view s);

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;
};

enum class SpaceKind { kHypercube, kHammingSlice, kIndependentSets };

std::string_view to_string(SpaceKind k);

inline constexpr int kDefaultSiteCap = 30;
inline constexpr std::uint64_t kDefaultStateCap = std::uint64_t{1} << 26;

struct SpaceLimits {
  int max_sites = kDefaultSiteCap;
  std::uint64_t max_states = kDefaultStateCap;
};

/// Binomial coefficient C(n, k) for 0 <= n <= 64 (0 when k is out of range).
std::uint64_t binomial(int n, int k) noexcept;

/// Feasible configurations with a dense index.
///
/// In every kind, states are ordered by the integer value of their bit word:
/// the hypercube index is the word itself, slice indices come from the
/// combinatorial number system (which is that same order restricted to
/// weight k), and independent sets are stored sorted and binary-searched.
class StateSpace {
 public:
  static StateSpace hypercube(int n, const SpaceLimits& limits = {});
  static StateSpace hamming_slice(int n, int k, const SpaceLimits& limits = {});
  static StateSpace independent_sets(const Graph& g, const SpaceLimits& limits = {});

  SpaceKind kind() const noexcept { return kind_; }
  int n() const noexcept { return n_; }
  /// Hamming weight of the slice; -1 for other kinds.
  int k() const noexcept { return k_; }
  std::size_t size() const noexcept { return size_; }
  /// Conflict graph masks for independent-set spaces (empty otherwise).
  const std::vector<std::uint64_t>& conflict_masks() const noexcept { return masks_; }

  bool contains(std::uint64_t bits) const noexcept;
  /// Throws MembershipError when `bits` is infeasible.
  std::size_t rank(std::uint64_t bits) const;
  std::size_t rank(const SpinConfig& x) const;
  std::uint64_t unrank_bits(std::size_t index) const;
  SpinConfig unrank(std::size_t index) const;

 private:
  StateSpace() = default;
  std::size_t rank_unchecked(std::uint64_t bits) const noexcept;

  SpaceKind kind_ = SpaceKind::kHypercube;
  int n_ = 0;
  int k_ = -1;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> table_;
  std::vector<std::uint64_t> masks_;
};

using StateSpacePtr = std::shared_ptr<const StateSpace>;

}  // namespace splab
