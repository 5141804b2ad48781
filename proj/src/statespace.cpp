#include "splab/statespace.hpp"

#include <algorithm>
#include <array>

#include "splab/error.hpp"

namespace splab {

namespace {

using BinomTable = std::array<std::array<std::uint64_t, 65>, 65>;

const BinomTable& binom_table() {
  static const BinomTable table = [] {
    BinomTable t{};
    for (int n = 0; n <= 64; ++n) {
      t[n][0] = 1;
      for (int k = 1; k <= n; ++k) t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0);
    }
    return t;
  }();
  return table;
}

void check_sites(int n, const SpaceLimits& limits) {
  if (n < 1) throw ValidationError("state space needs at least one site");
  if (n > limits.max_sites || n > 63)
    throw CapacityError("state space: n = " + std::to_string(n) + " exceeds the site cap of " +
                        std::to_string(std::min(limits.max_sites, 63)));
}

void check_states(std::uint64_t m, const SpaceLimits& limits) {
  if (m > limits.max_states)
    throw CapacityError("state space: " + std::to_string(m) + " states exceed the limit of " +
                        std::to_string(limits.max_states));
}

}  // namespace

std::uint64_t binomial(int n, int k) noexcept {
  if (n < 0 || n > 64 || k < 0 || k > n) return 0;
  return binom_table()[n][k];
}

std::string SpinConfig::to_string() const {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i)
    if (get(i)) s[i] = '1';
  return s;
}

SpinConfig SpinConfig::from_string(std::string_view s) {
  if (s.size() > 64) throw ValidationError("configuration longer than 64 sites");
  SpinConfig x;
  x.n = static_cast<int>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1')
      x.bits |= std::uint64_t{1} << i;
    else if (s[i] != '0')
      throw ValidationError("configuration string must contain only 0 and 1");
  }
  return x;
}

std::string_view to_string(SpaceKind k) {
  switch (k) {
    case SpaceKind::kHypercube: return "hypercube";
    case SpaceKind::kHammingSlice: return "hamming-slice";
    case SpaceKind::kIndependentSets: return "independent-sets";
  }
  return "?";
}

StateSpace StateSpace::hypercube(int n, const SpaceLimits& limits) {
  check_sites(n, limits);
  check_states(std::uint64_t{1} << n, limits);
  StateSpace s;
  s.kind_ = SpaceKind::kHypercube;
  s.n_ = n;
  s.size_ = std::size_t{1} << n;
  return s;
}

StateSpace StateSpace::hamming_slice(int n, int k, const SpaceLimits& limits) {
  check_sites(n, limits);
  if (k < 0 || k > n) throw ValidationError("hamming slice: k must lie in [0, n]");
  check_states(binomial(n, k), limits);
  StateSpace s;
  s.kind_ = SpaceKind::kHammingSlice;
  s.n_ = n;
  s.k_ = k;
  s.size_ = binomial(n, k);
  return s;
}

StateSpace StateSpace::independent_sets(const Graph& g, const SpaceLimits& limits) {
  check_sites(g.n, limits);
  g.validate();
  StateSpace s;
  s.kind_ = SpaceKind::kIndependentSets;
  s.n_ = g.n;
  s.masks_ = g.neighbor_masks();
  const int n = g.n;
  // Backtracking over vertices n-1 .. 0 deciding "out" before "in" yields
  // the sets in increasing order of their bit word.
  std::vector<std::uint64_t>& out = s.table_;
  struct Frame {
    int v;
    std::uint64_t bits;
    std::uint64_t blocked;
  };
  std::vector<Frame> stack{{n - 1, 0, 0}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.v < 0) {
      out.push_back(f.bits);
      if (out.size() > limits.max_states)
        throw CapacityError("independent sets exceed the limit of " + std::to_string(limits.max_states) +
                            " states");
      continue;
    }
    const std::uint64_t bit = std::uint64_t{1} << f.v;
    // LIFO: push "in" first so "out" is expanded first.
    if (!(f.blocked & bit)) stack.push_back({f.v - 1, f.bits | bit, f.blocked | s.masks_[f.v]});
    stack.push_back({f.v - 1, f.bits, f.blocked});
  }
  s.size_ = out.size();
  return s;
}

bool StateSpace::contains(std::uint64_t bits) const noexcept {
  if (n_ < 64 && (bits >> n_) != 0) return false;
  switch (kind_) {
    case SpaceKind::kHypercube: return true;
    case SpaceKind::kHammingSlice: return __builtin_popcountll(bits) == k_;
    case SpaceKind::kIndependentSets: {
      for (std::uint64_t r = bits; r; r &= r - 1)
        if (masks_[__builtin_ctzll(r)] & bits) return false;
      return true;
    }
  }
  return false;
}

std::size_t StateSpace::rank_unchecked(std::uint64_t bits) const noexcept {
  switch (kind_) {
    case SpaceKind::kHypercube: return static_cast<std::size_t>(bits);
    case SpaceKind::kHammingSlice: {
      const auto& t = binom_table();
      std::size_t r = 0;
      int j = 1;
      for (std::uint64_t b = bits; b; b &= b - 1, ++j) r += t[__builtin_ctzll(b)][j];
      return r;
    }
    case SpaceKind::kIndependentSets:
      return static_cast<std::size_t>(std::lower_bound(table_.begin(), table_.end(), bits) - table_.begin());
  }
  return 0;
}

std::size_t StateSpace::rank(std::uint64_t bits) const {
  if (!contains(bits)) throw MembershipError("configuration is not in the " + std::string(to_string(kind_)) + " space");
  return rank_unchecked(bits);
}

std::size_t StateSpace::rank(const SpinConfig& x) const {
  if (x.n != n_) throw MembershipError("configuration has " + std::to_string(x.n) + " sites, space has " +
                                       std::to_string(n_));
  return rank(x.bits);
}

std::uint64_t StateSpace::unrank_bits(std::size_t index) const {
  if (index >= size_) throw ValidationError("state index " + std::to_string(index) + " out of range");
  switch (kind_) {
    case SpaceKind::kHypercube: return index;
    case SpaceKind::kHammingSlice: {
      const auto& t = binom_table();
      std::uint64_t bits = 0;
      std::uint64_t r = index;
      int c = n_ - 1;
      for (int j = k_; j >= 1; --j) {
        while (t[c][j] > r) --c;
        r -= t[c][j];
        bits |= std::uint64_t{1} << c;
        --c;
      }
      return bits;
    }
    case SpaceKind::kIndependentSets: return table_[index];
  }
  return 0;
}

SpinConfig StateSpace::unrank(std::size_t index) const { return {unrank_bits(index), n_}; }

}  // namespace splab
