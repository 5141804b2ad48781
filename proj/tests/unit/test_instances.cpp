#include <cmath>
#include <sstream>

#include "doctest.h"
#include "splab/error.hpp"
#include "splab/instances.hpp"
#include "splab/rng.hpp"

using namespace splab;

TEST_CASE("erdos-renyi with p = 1 is complete") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Graph g = erdos_renyi(4, 1.0, s);
    CHECK(g.num_edges() == 6);
    CHECK(g == complete_graph(4));
  }
}

TEST_CASE("erdos-renyi edge count matches the binomial mean") {
  const int n = 30;
  const double p = log_density_edge_probability(n);
  CHECK(p == doctest::Approx(2.0 * std::log(30.0) / 30.0));
  const int trials = 1000;
  double sum = 0.0;
  for (int s = 0; s < trials; ++s) sum += static_cast<double>(erdos_renyi(n, p, s + 1).num_edges());
  const double pairs = n * (n - 1) / 2.0;
  const double sigma_mean = std::sqrt(pairs * p * (1 - p) / trials);
  CHECK(std::abs(sum / trials - pairs * p) <= 3.0 * sigma_mean);
}

TEST_CASE("erdos-renyi is deterministic in the seed") {
  CHECK(erdos_renyi(20, 0.3, 42) == erdos_renyi(20, 0.3, 42));
  CHECK_FALSE(erdos_renyi(20, 0.3, 42) == erdos_renyi(20, 0.3, 43));
}

TEST_CASE("random-regular") {
  SUBCASE("5-regular on 6 vertices is K6") { CHECK(random_regular(6, 5, 9) == complete_graph(6)); }
  SUBCASE("degrees are exact") {
    for (std::uint64_t s = 1; s <= 10; ++s) {
      const Graph g = random_regular(12, 3, s);
      g.validate();
      for (int d : g.degrees()) CHECK(d == 3);
    }
  }
  SUBCASE("odd n d rejected") { CHECK_THROWS_AS(random_regular(5, 3, 1), ValidationError); }
}

TEST_CASE("graph round trip") {
  SUBCASE("K4") {
    const Graph g = complete_graph(4);
    std::stringstream ss;
    write_graph(ss, g);
    CHECK(read_graph(ss) == g);
  }
  SUBCASE("weighted SK graph keeps every bit of the weights") {
    InstanceSpec spec;
    spec.n = 8;
    spec.model = GraphModel::kComplete;
    spec.cost = CostKind::kSk;
    spec.seed = 11;
    const Graph g = gen_graph(spec);
    REQUIRE(g.weighted());
    std::stringstream ss;
    write_graph(ss, g);
    const Graph back = read_graph(ss);
    REQUIRE(back.weights.size() == g.weights.size());
    for (std::size_t e = 0; e < g.weights.size(); ++e) CHECK(back.weights[e] == g.weights[e]);
  }
}

TEST_CASE("graph parse errors carry line numbers") {
  auto parse = [](const std::string& text) {
    std::stringstream ss(text);
    return read_graph(ss);
  };
  CHECK_THROWS_AS(parse("3 2 0\n0 1\n0 1\n"), ParseError);
  try {
    parse("3 2 0\n0 1\n0 1\n");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse("3 1 0\n1 1\n"), ParseError);
  CHECK_THROWS_AS(parse("3 2 0\n0 1\n"), ParseError);
  CHECK_THROWS_AS(parse("3 1 0\n0 x\n"), ParseError);
  CHECK_THROWS_AS(parse("3 1 1\n0 1\n"), ParseError);
}

TEST_CASE("format_double round-trips") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(20)) - 10.0);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("instance spec defaults") {
  InstanceSpec s;
  s.n = 24;
  s.cost = CostKind::kMaxCutHamming;
  CHECK(s.resolved_k() == 4);
  s.cost = CostKind::kMaxBisection;
  CHECK(s.resolved_k() == 12);
  s.cost = CostKind::kMisPenalized;
  CHECK(s.resolved_rho() == 24.0);
}

TEST_CASE("enum strings") {
  for (auto k : {CostKind::kMaxCutHamming, CostKind::kMaxBisection, CostKind::kMis, CostKind::kMisPenalized,
                 CostKind::kCspPenalized, CostKind::kIsing, CostKind::kSk})
    CHECK(parse_cost_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_cost_kind("maxcat"), ValidationError);
}
