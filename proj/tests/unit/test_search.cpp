#include <cmath>

#include "doctest.h"
#include "splab/error.hpp"
#include "splab/search.hpp"

using namespace splab;

namespace {

StateSpacePtr share(StateSpace s) { return std::make_shared<const StateSpace>(std::move(s)); }

// Edgeless Ising with a unit field: H = 2|x| - n, unique minimizer at x = 0.
CostSpec field_only(int n) {
  CostSpec c;
  c.kind = CostKind::kIsing;
  c.graph = Graph{n, {}, {}};
  c.field = 1.0;
  return c;
}

}  // namespace

TEST_CASE("zero steps returns the start state") {
  const auto space = share(StateSpace::hypercube(5));
  const Chain c(ChainKind::kHypercubeWalk, space, Graph{5, {}, {}}, {});
  Rng rng(1);
  const auto x0 = SpinConfig::from_string("10110");
  CHECK(run_chain(c, x0, 0, rng).bits == x0.bits);
  CHECK_THROWS_AS(run_chain(c, SpinConfig::from_string("101"), 1, rng), MembershipError);
}

TEST_CASE("uniform stationary law needs about M samples") {
  const int n = 6;
  const std::size_t m = 64;
  const auto space = share(StateSpace::hypercube(n));
  const CostSpec cost = field_only(n);
  // lazy, so a fixed number of steps does not pin the parity
  const Chain c(ChainKind::kHypercubeWalk, space, cost.graph, {.zeta = 0.5});
  const auto pi = stationary(c);
  const auto summary = ground_truth(cost, *space, pi.pi);
  REQUIRE(summary.minimizers.size() == 1);
  Rng rng(2024);
  double total = 0.0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const auto out = markov_chain_search(c, cost, SpinConfig{m - 1, n}, &summary, {.budget = 100000}, rng);
    REQUIRE(out.hit_optimum);
    CHECK(out.best_energy == -n);
    total += static_cast<double>(out.samples_used);
  }
  const double mean = total / trials;
  CHECK(mean >= m / 3.0);
  CHECK(mean <= 3.0 * m);
}

TEST_CASE("strong fugacity on an edgeless graph hits at once") {
  CostSpec cost;
  cost.kind = CostKind::kMis;
  cost.graph = Graph{4, {}, {}};
  const auto space = share(StateSpace::independent_sets(cost.graph));
  const Chain c(ChainKind::kGlauberHardcore, space, cost.graph, {.lambda = 1e9});
  const auto summary = ground_truth(cost, *space, stationary(c).pi);
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto out = markov_chain_search(c, cost, SpinConfig{0, 4}, &summary, {.budget = 10}, rng);
    CHECK(out.hit_optimum);
    CHECK(out.samples_used == 1);
    CHECK(out.best_state.bits == 0b1111);
  }
}

TEST_CASE("search without the oracle spends the whole budget") {
  const CostSpec cost = field_only(4);
  const auto space = share(StateSpace::hypercube(4));
  const Chain c(ChainKind::kHypercubeWalk, space, cost.graph, {.zeta = 0.5});
  Rng rng(9);
  const auto out = markov_chain_search(c, cost, SpinConfig{15, 4}, nullptr,
                                       {.budget = 50, .steps_per_sample = 3, .oracle = false}, rng);
  CHECK(out.samples_used == 50);
  CHECK(out.steps_per_sample == 3);
  CHECK(out.best_energy == eval_energy(cost, out.best_state));
  CHECK_THROWS_AS(markov_chain_search(c, cost, SpinConfig{15, 4}, nullptr, {.budget = 5}, rng), ValidationError);
  CHECK_THROWS_AS(markov_chain_search(c, cost, SpinConfig{15, 4}, nullptr, {.budget = 0, .oracle = false}, rng),
                  ValidationError);
}

TEST_CASE("default thinning") {
  const auto cube = share(StateSpace::hypercube(8));
  const Chain a(ChainKind::kHypercubeWalk, cube, Graph{8, {}, {}}, {});
  CHECK(default_steps_per_sample(a) == 8 * 3 * 10);
  const auto slice = share(StateSpace::hamming_slice(8, 4));
  const Chain b(ChainKind::kTranspositionWalk, slice, complete_graph(8), {});
  // k(n-k)/n = 2, ceil(ln 70) = 5
  CHECK(default_steps_per_sample(b) == 100);
}

TEST_CASE("gibbs versus uniform advantage") {
  CostSpec cost;
  cost.kind = CostKind::kIsing;
  cost.graph = erdos_renyi(7, 0.5, 3);
  const auto s = ground_truth(cost, StateSpace::hypercube(7), std::vector<double>(128, 1.0 / 128));
  CHECK(gibbs_vs_uniform_advantage(cost, 0.0, 0.5).ratio ==
        doctest::Approx(static_cast<double>(s.minimizers.size())));
  double prev = 0.0;
  for (int i = 0; i <= 30; ++i) {
    const double r = gibbs_vs_uniform_advantage(cost, 0.1 * i, 0.5).ratio;
    CHECK(r >= prev * (1.0 - 1e-12));
    prev = r;
  }
}

TEST_CASE("ising K2 partition function") {
  CostSpec cost;
  cost.kind = CostKind::kIsing;
  cost.graph = complete_graph(2);
  const double beta = 1.0;
  const double z = 2.0 * std::exp(-beta) + 2.0 * std::exp(beta);
  // minimizers are the two antialigned states with energy -1
  CHECK(gibbs_vs_uniform_advantage(cost, beta, 0.5).ratio == doctest::Approx(4.0 * 2.0 * std::exp(beta) / z));
}
