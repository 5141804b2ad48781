#include <set>

#include "doctest.h"
#include "splab/error.hpp"
#include "splab/statespace.hpp"

using namespace splab;

namespace {

// Brute-force independent sets in ascending bit order.
std::vector<std::uint64_t> brute_independent(const Graph& g) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << g.n); ++x) {
    bool ok = true;
    for (const auto& e : g.edges) ok = ok && !(((x >> e.i) & 1) && ((x >> e.j) & 1));
    if (ok) out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_CASE("sizes") {
  CHECK(StateSpace::hamming_slice(4, 2).size() == 6);
  CHECK(StateSpace::hypercube(5).size() == 32);
  Graph k2{2, {{0, 1}}, {}};
  CHECK(StateSpace::independent_sets(k2).size() == 3);
  Graph p3{3, {{0, 1}, {1, 2}}, {}};
  CHECK(StateSpace::independent_sets(p3).size() == 5);
}

TEST_CASE("hypercube rank is the binary value") {
  const auto s = StateSpace::hypercube(3);
  CHECK(s.rank(0b101) == 5);
  CHECK(s.unrank_bits(6) == 6);
}

TEST_CASE("slice order and rank/unrank identity") {
  const auto s = StateSpace::hamming_slice(4, 2);
  const std::vector<std::uint64_t> expected{0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(s.unrank_bits(i) == expected[i]);
    CHECK(s.rank(s.unrank_bits(i)) == i);
  }
  CHECK_THROWS_AS(s.rank(0b0111), MembershipError);
}

TEST_CASE("larger slices enumerate every weight-k word in order") {
  for (int n : {7, 10}) {
    for (int k = 0; k <= n; ++k) {
      const auto s = StateSpace::hamming_slice(n, k);
      CHECK(s.size() == binomial(n, k));
      std::size_t idx = 0;
      for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
        if (__builtin_popcountll(x) != k) continue;
        CHECK(s.unrank_bits(idx) == x);
        CHECK(s.rank(x) == idx);
        ++idx;
      }
    }
  }
}

TEST_CASE("independent sets match brute force") {
  Graph g{9, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {5, 6}, {6, 7}, {2, 8}, {5, 8}}, {}};
  const auto s = StateSpace::independent_sets(g);
  const auto brute = brute_independent(g);
  REQUIRE(s.size() == brute.size());
  for (std::size_t i = 0; i < brute.size(); ++i) {
    CHECK(s.unrank_bits(i) == brute[i]);
    CHECK(s.rank(brute[i]) == i);
  }
  Graph k2{2, {{0, 1}}, {}};
  CHECK_THROWS_AS(StateSpace::independent_sets(k2).rank(0b11), MembershipError);
}

TEST_CASE("capacity limits") {
  CHECK_THROWS_AS(StateSpace::hypercube(31), CapacityError);
  SpaceLimits tight{30, 100};
  CHECK_THROWS_AS(StateSpace::hypercube(8, tight), CapacityError);
  CHECK_THROWS_AS(StateSpace::hamming_slice(20, 10, tight), CapacityError);
}

TEST_CASE("spin config strings") {
  const auto x = SpinConfig::from_string("10");
  CHECK(x.bits == 1);
  CHECK(x.n == 2);
  CHECK(x.spin(0) == 1);
  CHECK(x.spin(1) == -1);
  CHECK(x.to_string() == "10");
}
