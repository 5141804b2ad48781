#include <cmath>

#include "doctest.h"
#include "splab/cost.hpp"
#include "splab/error.hpp"
#include "splab/rng.hpp"

using namespace splab;

namespace {

Graph k3() { return complete_graph(3); }
Graph k2() { return complete_graph(2); }

CostSpec make(CostKind kind, Graph g, int k = -1, double rho = 0.0) {
  CostSpec c;
  c.kind = kind;
  c.graph = std::move(g);
  c.k = k;
  c.rho = rho;
  return c;
}

// Direct formulas, independent of the evaluator's bit tricks.
double maxcut_oracle(const Graph& g, std::uint64_t x) {
  double h = 0.0;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const int si = ((x >> g.edges[e].i) & 1) ? 1 : -1, sj = ((x >> g.edges[e].j) & 1) ? 1 : -1;
    h -= g.weight(e) * (1 - si * sj) / 2.0;
  }
  return h;
}

}  // namespace

TEST_CASE("energy examples") {
  const auto mc = make(CostKind::kMaxCutHamming, k3(), 1);
  for (std::uint64_t x : {1u, 2u, 4u}) CHECK(eval_energy(mc, {x, 3}) == -2.0);

  const auto mp = make(CostKind::kMisPenalized, k2(), -1, 2.0);
  CHECK(eval_energy(mp, {0b11, 2}) == 0.0);
  CHECK(eval_energy(mp, {0b01, 2}) == -1.0);

  const auto is = make(CostKind::kIsing, k2());
  CHECK(eval_energy(is, SpinConfig::from_string("10")) == -1.0);
  CHECK(eval_energy(is, SpinConfig::from_string("11")) == 1.0);
}

TEST_CASE("maxcut evaluator matches the direct formula") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    Graph g = erdos_renyi(10, 0.4, t + 1);
    if (t % 2) {
      g.weights.resize(g.edges.size());
      for (auto& w : g.weights) w = rng.normal();
    }
    const auto c = make(CostKind::kMaxCutHamming, g, 3);
    const EnergyEvaluator ev(c);
    for (std::uint64_t x = 0; x < 1024; ++x) CHECK(ev(x) == doctest::Approx(maxcut_oracle(g, x)).epsilon(1e-12));
  }
}

TEST_CASE("sk energy uses couplings scaled by 1/sqrt(n)") {
  Graph g = complete_graph(5);
  g.weights = {0.3, -1.2, 0.7, 2.0, -0.4, 0.1, 1.5, -0.9, 0.25, 0.6};
  const auto c = make(CostKind::kSk, g);
  for (std::uint64_t x = 0; x < 32; ++x) {
    double h = 0.0;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const int si = ((x >> g.edges[e].i) & 1) ? 1 : -1, sj = ((x >> g.edges[e].j) & 1) ? 1 : -1;
      h += g.weights[e] / std::sqrt(5.0) * si * sj;
    }
    CHECK(eval_energy(c, {x, 5}) == doctest::Approx(h).epsilon(1e-13));
  }
}

TEST_CASE("ground truth examples") {
  SUBCASE("mis on K2") {
    const auto c = make(CostKind::kMis, k2());
    const auto s = StateSpace::independent_sets(k2());
    const std::vector<double> pi(3, 1.0 / 3.0);
    const auto gt = ground_truth(c, s, pi);
    CHECK(gt.e_star == -1.0);
    CHECK(gt.minimizers.size() == 2);
    CHECK(gt.pi_estar == doctest::Approx(2.0 / 3.0));
  }
  SUBCASE("maxcut on K3 slice k=1") {
    const auto c = make(CostKind::kMaxCutHamming, k3(), 1);
    const auto s = StateSpace::hamming_slice(3, 1);
    const std::vector<double> pi(3, 1.0 / 3.0);
    const auto gt = ground_truth(c, s, pi);
    CHECK(gt.e_star == -2.0);
    CHECK(gt.minimizers.size() == 3);
    CHECK(gt.pi_estar == doctest::Approx(1.0));
  }
  SUBCASE("constant zero cost is an invariant breach") {
    const auto c = make(CostKind::kMaxCutHamming, Graph{4, {}, {}}, 2);
    const auto s = StateSpace::hamming_slice(4, 2);
    const std::vector<double> pi(6, 1.0 / 6.0);
    CHECK_THROWS_AS(ground_truth(c, s, pi), InvariantBreach);
  }
}

TEST_CASE("closed-form slice mean") {
  CHECK(mean_energy_closed_form(make(CostKind::kMaxCutHamming, k3(), 1), 1) == doctest::Approx(-2.0));
  CHECK(mean_energy_closed_form(make(CostKind::kMaxCutHamming, Graph{4, {{0, 1}}, {}}, 2), 2) ==
        doctest::Approx(-2.0 / 3.0));
  CHECK(mean_energy_closed_form(make(CostKind::kMaxCutHamming, k3(), 0), 0) == 0.0);
  for (int t = 1; t <= 5; ++t) {
    const Graph g = erdos_renyi(9, 0.5, t);
    for (int k = 1; k < 9; ++k) {
      const auto c = make(CostKind::kMaxCutHamming, g, k);
      const auto s = StateSpace::hamming_slice(9, k);
      double sum = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) sum += maxcut_oracle(g, s.unrank_bits(i));
      CHECK(mean_energy_closed_form(c, k) == doctest::Approx(sum / s.size()).epsilon(1e-12));
    }
  }
}

TEST_CASE("mean centering zeroes the stationary mean") {
  const Graph g = erdos_renyi(8, 0.5, 3);
  const auto c = make(CostKind::kMaxCutHamming, g, 3);
  const auto s = StateSpace::hamming_slice(8, 3);
  const std::vector<double> pi(s.size(), 1.0 / s.size());
  const auto centered = mean_centered(c, s, pi);
  const auto summary = enumerate_energies(centered, s, pi);
  CHECK(std::abs(summary.mean_pi) < 1e-12);
}

TEST_CASE("csp constraints") {
  SUBCASE("degenerate constraints are rejected") {
    CHECK_THROWS_AS(make_csp_cost(complete_graph(3), {{{0, 1}, 0b0000}}), DegenerateConstraintError);
    CHECK_THROWS_AS(make_csp_cost(complete_graph(3), {{{0, 1}, 0b1111}}), DegenerateConstraintError);
  }
  SUBCASE("normalized penalized objective") {
    const Graph g = complete_graph(3);
    const auto c = make_csp_cost(g, {{{0, 1}, 0b0110}});
    CHECK(c.base_norm == 2.0);
    for (std::uint64_t x = 0; x < 8; ++x) {
      const double base = maxcut_oracle(g, x) / 2.0;
      const int local = static_cast<int>((x & 1) | (((x >> 1) & 1) << 1));
      const bool sat = (0b0110 >> local) & 1;
      // two of four patterns satisfy: -1/2 when satisfied, +1/2 otherwise
      CHECK(eval_energy(c, {x, 3}) == doctest::Approx(base + (sat ? -0.5 : 0.5)).epsilon(1e-14));
    }
  }
}
