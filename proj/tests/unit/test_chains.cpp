#include <cmath>

#include "doctest.h"
#include "splab/chains.hpp"
#include "splab/eigensolver.hpp"
#include "splab/error.hpp"

using namespace splab;

namespace {

Graph k2() { return complete_graph(2); }

StateSpacePtr share(StateSpace s) { return std::make_shared<const StateSpace>(std::move(s)); }

}  // namespace

TEST_CASE("hardcore kernel on K2") {
  const auto space = share(StateSpace::independent_sets(k2()));
  const Chain c(ChainKind::kGlauberHardcore, space, k2(), {.lambda = 1.0});
  CHECK(c.transition_prob(0b00, 0b01) == doctest::Approx(0.25));
  CHECK(c.transition_prob(0b00, 0b00) == doctest::Approx(0.5));
  CHECK(c.transition_prob(0b01, 0b00) == doctest::Approx(0.25));
  CHECK(c.transition_prob(0b01, 0b01) == doctest::Approx(0.75));
  CHECK(c.transition_prob(0b01, 0b10) == 0.0);

  const auto pi = stationary(c);
  for (double p : pi.pi) CHECK(p == doctest::Approx(1.0 / 3.0));
  const auto d = discriminant(c, pi);
  CHECK(d.at(0, 1) == doctest::Approx(0.25));
  CHECK(d.asymmetry() < 1e-15);
}

TEST_CASE("hardcore weights with lambda = 2") {
  const auto space = share(StateSpace::independent_sets(k2()));
  const Chain c(ChainKind::kGlauberHardcore, space, k2(), {.lambda = 2.0});
  const auto pi = stationary(c);
  CHECK(std::exp(pi.log_z) == doctest::Approx(5.0));
  CHECK(pi.pi[0] == doctest::Approx(0.2));
  CHECK(pi.pi[1] == doctest::Approx(0.4));
  CHECK(pi.pi[2] == doctest::Approx(0.4));
}

TEST_CASE("transposition walk n=3 k=1") {
  const auto space = share(StateSpace::hamming_slice(3, 1));
  const Chain c(ChainKind::kTranspositionWalk, space, complete_graph(3), {});
  CHECK(c.transition_prob(0b001, 0b010) == doctest::Approx(0.5));
  CHECK(c.transition_prob(0b001, 0b100) == doctest::Approx(0.5));
  CHECK(c.self_loop(0b001) == doctest::Approx(0.0));
  const auto pi = stationary(c);
  const auto d = discriminant(c, pi);
  std::vector<double> vals;
  dense_eigh(d.scaled_plus_diagonal(-1.0, {}).to_dense(), 3, vals, nullptr);
  CHECK(vals[0] == doctest::Approx(-1.0));
  CHECK(vals[1] == doctest::Approx(0.5));
  CHECK(vals[2] == doctest::Approx(0.5));
  const std::vector<double> u(3, 1.0 / std::sqrt(3.0));
  const auto du = d.matvec(u);
  for (double v : du) CHECK(v == doctest::Approx(1.0 / std::sqrt(3.0)));
}

TEST_CASE("glauber ising at beta = 0 is a lazy hypercube walk") {
  const Graph g = erdos_renyi(5, 0.6, 4);
  const auto space = share(StateSpace::hypercube(5));
  const Chain c(ChainKind::kGlauberIsing, space, g, {.beta = 0.0});
  for (std::uint64_t x = 0; x < 32; ++x) {
    for (int i = 0; i < 5; ++i) CHECK(c.transition_prob(x, x ^ (1ULL << i)) == doctest::Approx(0.1));
    CHECK(c.self_loop(x) == doctest::Approx(0.5));
  }
}

TEST_CASE("ising concentrates on minimizers at large beta") {
  const auto space = share(StateSpace::hypercube(2));
  const Chain c(ChainKind::kGlauberIsing, space, k2(), {.beta = 20.0});
  const auto pi = stationary(c);
  CHECK(pi.pi[0b01] + pi.pi[0b10] >= 1.0 - 1e-8);
  // exact: Z = 2 e^{20} + 2 e^{-20}
  CHECK(pi.pi[0b01] == doctest::Approx(std::exp(20.0) / (2 * std::exp(20.0) + 2 * std::exp(-20.0))));
}

TEST_CASE("detailed balance and stochasticity for every kind") {
  const Graph g = erdos_renyi(7, 0.5, 2);
  Graph gw = g;
  gw.weights.assign(g.edges.size(), 0.0);
  for (std::size_t e = 0; e < gw.weights.size(); ++e) gw.weights[e] = std::sin(1.0 + static_cast<double>(e));
  struct Case {
    ChainKind kind;
    StateSpacePtr space;
    const Graph* graph;
    ChainParams params;
  };
  const std::vector<Case> cases = {
      {ChainKind::kHypercubeWalk, share(StateSpace::hypercube(7)), &g, {}},
      {ChainKind::kTranspositionWalk, share(StateSpace::hamming_slice(7, 3)), &g, {}},
      {ChainKind::kGlauberHardcore, share(StateSpace::independent_sets(g)), &g, {.lambda = 2.5}},
      {ChainKind::kGlauberIsing, share(StateSpace::hypercube(7)), &g, {.beta = 0.8, .field = 0.3}},
      {ChainKind::kGlauberSk, share(StateSpace::hypercube(7)), &gw, {.beta = 1.1}},
  };
  for (const auto& cs : cases) {
    for (double zeta : {0.0, 0.4}) {
      ChainParams p = cs.params;
      p.zeta = zeta;
      const Chain c(cs.kind, cs.space, *cs.graph, p);
      const auto pi = stationary(c);
      const auto rep = check_balance(c, pi);
      CHECK(rep.detailed_balance <= 1e-12);
      CHECK(rep.row_sum <= 1e-14);
      // dense oracle: pi P = pi
      const auto pm = transition_matrix(c).to_dense();
      const std::size_t m = cs.space->size();
      for (std::size_t y = 0; y < m; ++y) {
        double s = 0.0;
        for (std::size_t x = 0; x < m; ++x) s += pi.pi[x] * pm[x * m + y];
        CHECK(s == doctest::Approx(pi.pi[y]).epsilon(1e-12));
      }
      const auto d = discriminant(c, pi);
      const auto sp = pi.sqrt_pi();
      const auto v = d.matvec(sp);
      for (std::size_t i = 0; i < m; ++i) CHECK(std::abs(v[i] - sp[i]) <= 1e-12);
    }
  }
}

TEST_CASE("full laziness gives D = I") {
  const auto space = share(StateSpace::hamming_slice(5, 2));
  const Chain c(ChainKind::kTranspositionWalk, space, complete_graph(5), {.zeta = 1.0});
  const auto d = discriminant(c, stationary(c));
  const auto dense = d.to_dense();
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) CHECK(dense[i * 10 + j] == (i == j ? 1.0 : 0.0));
}

TEST_CASE("chain and space pairing") {
  CHECK_THROWS_AS(Chain(ChainKind::kTranspositionWalk, share(StateSpace::hypercube(3)), complete_graph(3), {}),
                  PairingError);
  CHECK_THROWS_AS(Chain(ChainKind::kGlauberHardcore, share(StateSpace::hamming_slice(3, 1)), complete_graph(3), {}),
                  PairingError);
}

TEST_CASE("critical thresholds") {
  CHECK(critical_threshold(ThresholdKind::kHardcore, 3) == doctest::Approx(4.0));
  CHECK(critical_threshold(ThresholdKind::kHardcore, 4) == doctest::Approx(27.0 / 16.0));
  CHECK(critical_threshold(ThresholdKind::kIsingAntiferro, 4) == doctest::Approx(0.5));
  CHECK_THROWS_AS(critical_threshold(ThresholdKind::kHardcore, 2), DomainError);
}

TEST_CASE("sampling frequencies match the stationary law") {
  const auto space = share(StateSpace::independent_sets(k2()));
  const Chain c(ChainKind::kGlauberHardcore, space, k2(), {.lambda = 1.0});
  Rng rng(17);
  std::vector<double> counts(3, 0.0);
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    std::uint64_t x = 0;
    for (int s = 0; s < 40; ++s) x = c.step(x, rng);
    counts[space->rank(x)] += 1.0;
  }
  double tv = 0.0;
  for (double v : counts) tv += std::abs(v / trials - 1.0 / 3.0);
  CHECK(tv / 2.0 <= 0.02);
}
