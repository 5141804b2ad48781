#include <cmath>

#include "doctest.h"
#include "splab/error.hpp"
#include "splab/theory.hpp"

using namespace splab;

namespace {

CostSpec maxcut(const Graph& g, int k) {
  CostSpec c;
  c.kind = CostKind::kMaxCutHamming;
  c.graph = g;
  c.k = k;
  return c;
}

CostSpec mis(const Graph& g) {
  CostSpec c;
  c.kind = CostKind::kMis;
  c.graph = g;
  return c;
}

// Dense-kernel oracle for Delta_P, Delta~ and |H|_P.
struct Oracle {
  double delta_p = 0.0, delta_tilde = -1e300, lip = 0.0;
};

Oracle oracle(const Problem& p, double eta) {
  const auto pm = transition_matrix(*p.chain).to_dense();
  const std::size_t m = p.size();
  const auto& h = p.summary.energies;
  const double s = std::abs(p.summary.e_star);
  Oracle o;
  for (std::size_t x = 0; x < m; ++x) {
    double mh = 0.0, mg = 0.0, sq = 0.0;
    for (std::size_t y = 0; y < m; ++y) {
      const double q = pm[x * m + y];
      mh += q * h[y];
      mg += q * std::min(0.0, (h[y] / s + 1.0 - eta) / eta);
      sq += q * (h[x] - h[y]) * (h[x] - h[y]);
    }
    o.delta_tilde = std::max(o.delta_tilde, mh - h[x]);
    o.delta_p = std::max(o.delta_p, s * (mg * eta - 1.0 + eta) - h[x]);
    o.lip = std::max(o.lip, sq);
  }
  return o;
}

EnergySummary summary_with(double mean, double e_star, double pi_estar) {
  EnergySummary s;
  s.mean_pi = mean;
  s.e_star = e_star;
  s.pi_estar = pi_estar;
  return s;
}

}  // namespace

TEST_CASE("tail bound exponents") {
  // dev = 0 - (1 - 0.5)(-6) = 3
  const auto s = summary_with(0.0, -6.0, std::exp(-10.0));
  CHECK(tail_bound_gamma(TailMethod::kHerbst, 0.1, s, 0.5, 1.0) == doctest::Approx(0.09));
  CHECK(tail_bound_gamma(TailMethod::kPoincare, 0.25, s, 0.5, 1.0) == doctest::Approx(0.15));
  const auto flat = summary_with(-10.0, -6.0, 0.1);
  CHECK_THROWS_AS(tail_bound_gamma(TailMethod::kHerbst, 0.1, flat, 0.5, 1.0), DomainError);
}

TEST_CASE("critical b values") {
  CHECK(b_star_log_sobolev(0.5, 0.1, std::exp(-10.0)) == doctest::Approx(1.0 / 3.0));
  CHECK(b_star_poincare(1.0) == doctest::Approx(0.8798).epsilon(1e-4));
}

TEST_CASE("predicted exponent") {
  const double pis = std::exp(-10.0);
  const auto p = predicted_exponent(0.3, 0.5, -10.0, pis, 1.0);
  CHECK(p.value == doctest::Approx(0.4625));
  CHECK_FALSE(p.below_zero);
  CHECK(predicted_exponent(0.0, 0.5, -10.0, pis, 0.0).value == 0.5);
  const auto neg = predicted_exponent(50.0, 0.5, -10.0, pis, 1.0);
  CHECK(neg.below_zero);
  CHECK(neg.clamped == 0.0);
  CHECK_THROWS_AS(predicted_exponent(0.3, 0.5, -10.0, pis, 0.0), DomainError);
}

TEST_CASE("transposition log-Sobolev bound") {
  CHECK(transposition_ls_bound(4, 2).omega_lower == doctest::Approx(1.0));
  CHECK_THROWS_AS(transposition_ls_bound(4, 0), DomainError);
}

TEST_CASE("two-state chain constants") {
  const auto space = std::make_shared<const StateSpace>(StateSpace::hypercube(1));
  const Chain c(ChainKind::kHypercubeWalk, space, Graph{1, {}, {}}, {.zeta = 0.5});
  const auto est = ls_constant_estimate(c, stationary(c));
  CHECK(est.delta_exact == doctest::Approx(1.0));
  CHECK(est.omega_estimate <= est.delta_exact + 1e-12);
  CHECK(std::abs(est.omega_estimate - 0.5) <= 0.05);
}

TEST_CASE("laziness scales the gap") {
  const auto space = std::make_shared<const StateSpace>(StateSpace::hamming_slice(6, 2));
  const Graph g = complete_graph(6);
  const Chain base(ChainKind::kTranspositionWalk, space, g, {});
  const double d0 = ls_constant_estimate(base, stationary(base), {.random_starts = 0}).delta_exact;
  for (double zeta : {0.25, 0.5}) {
    const Chain lazy(ChainKind::kTranspositionWalk, space, g, {.zeta = zeta});
    const double d = ls_constant_estimate(lazy, stationary(lazy), {.random_starts = 0}).delta_exact;
    CHECK(d == doctest::Approx((1.0 - zeta) * d0).epsilon(1e-10));
  }
}

TEST_CASE("stability quantities match a dense oracle") {
  for (std::uint64_t s = 1; s <= 6; ++s) {
    const Problem p = build_problem(maxcut(erdos_renyi(8, 0.5, s), 3), ChainKind::kTranspositionWalk, {});
    for (double eta : {0.25, 0.5, 0.75}) {
      const auto st = delta_p_stability(*p.chain, p.summary.energies, p.summary.e_star, eta);
      const auto o = oracle(p, eta);
      CHECK(st.delta_p_eta == doctest::Approx(o.delta_p).epsilon(1e-12));
      CHECK(st.delta_tilde == doctest::Approx(o.delta_tilde).epsilon(1e-12));
      CHECK(st.delta_p_eta <= st.delta_tilde + 1e-12);
      CHECK(st.delta_tilde <= std::sqrt(o.lip) + 1e-12);
    }
    CHECK(pseudo_lipschitz(*p.chain, p.summary.energies) == doctest::Approx(oracle(p, 0.5).lip).epsilon(1e-12));
  }
}

TEST_CASE("constant cost has zero pseudo-Lipschitz norm and stability") {
  const Problem p = build_problem(maxcut(complete_graph(5), 1), ChainKind::kTranspositionWalk, {});
  CHECK(pseudo_lipschitz(*p.chain, p.summary.energies) == 0.0);
  CHECK(delta_p_stability(*p.chain, p.summary.energies, p.summary.e_star, 0.5).delta_p_eta == 0.0);
}

TEST_CASE("mis on K2") {
  const Graph g = complete_graph(2);
  const Problem p = build_problem(mis(g), ChainKind::kGlauberHardcore, {.lambda = 1.0});
  const auto sd = spectral_density(p.summary.energies, p.pi.pi, 0.5, p.summary);
  CHECK(sd.tail_mass == doctest::Approx(2.0 / 3.0));
  CHECK(sd.gamma_emp == doctest::Approx(1.0));
}

TEST_CASE("mis pseudo-Lipschitz norm is at most one under Glauber") {
  for (std::uint64_t s = 1; s <= 4; ++s) {
    for (double lambda : {0.5, 1.0, 3.0}) {
      const Problem p = build_problem(mis(erdos_renyi(8, 0.4, s)), ChainKind::kGlauberHardcore, {.lambda = lambda});
      CHECK(pseudo_lipschitz(*p.chain, p.summary.energies) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("subdepolarizing holds at alpha_P") {
  for (std::uint64_t s = 1; s <= 4; ++s) {
    const Problem p = build_problem(maxcut(erdos_renyi(8, 0.5, s), 4), ChainKind::kTranspositionWalk, {});
    const double eta = 0.5;
    const auto st = delta_p_stability(*p.chain, p.summary.energies, p.summary.e_star, eta);
    const double a = alpha_p(st.delta_p_eta, p.summary.e_star, eta);
    CHECK(subdepolarizing_violation(*p.chain, p.summary.energies, p.summary.e_star, eta, a, 1.0) <= 1e-12);
  }
}

TEST_CASE("dirichlet form and entropy") {
  const auto space = std::make_shared<const StateSpace>(StateSpace::hypercube(1));
  const Chain c(ChainKind::kHypercubeWalk, space, Graph{1, {}, {}}, {.zeta = 0.5});
  const std::vector<double> pi{0.5, 0.5}, f{1.0, 3.0};
  // (1/2) sum pi(x) P(x,y) (f(x)-f(y))^2 = (1/2)(2 * 0.5 * 0.5 * 4) = 1
  CHECK(dirichlet_form(c, pi, f) == doctest::Approx(1.0));
  const double norm = 5.0;
  CHECK(entropy_f2(pi, f) == doctest::Approx(0.5 * 9.0 * std::log(9.0) - norm * std::log(norm)));
  CHECK(entropy_f2(pi, {2.0, 2.0}) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("annealing overlaps") {
  SUBCASE("hardcore K2, lambda 1 to 1.1") {
    const auto space = StateSpace::independent_sets(complete_graph(2));
    const auto steps = anneal_hardcore(space, {1.0, 1.1});
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].step_ok);
    CHECK(steps[0].bound == doctest::Approx(0.9));
    CHECK(steps[0].overlap >= 0.9);
    // oracle: pi_1 = (1,1,1)/3, pi_2 = (1,1.1,1.1)/3.2
    const double exact = (1.0 + 2.0 * std::sqrt(1.1)) / std::sqrt(3.0 * 3.2);
    CHECK(steps[0].overlap == doctest::Approx(exact).epsilon(1e-14));
  }
  SUBCASE("hardcore step of 2/n gives a zero bound") {
    const auto space = StateSpace::independent_sets(complete_graph(4));
    const auto steps = anneal_hardcore(space, {1.0, 1.5});
    CHECK(steps[0].bound == doctest::Approx(0.0));
    CHECK(steps[0].step_ok);
  }
  SUBCASE("ising zero step") {
    const std::vector<double> e{1.0, -1.0, -1.0, 1.0};
    const auto steps = anneal_ising(e, {0.0, 0.0});
    CHECK(steps[0].overlap == doctest::Approx(1.0));
    CHECK(steps[0].bound == 1.0);
  }
  SUBCASE("ising step 1/|H| stays above exp(-1/2)") {
    const std::vector<double> e{2.0, -2.0, -1.0, 0.5, 1.5, -0.5, 0.0, -2.0};
    const auto steps = anneal_ising(e, {0.0, 0.5, 1.0, 1.5});
    for (const auto& s : steps) {
      CHECK(s.step_ok);
      CHECK(s.overlap >= std::exp(-0.5) - 1e-9);
      CHECK(s.overlap >= s.bound - 1e-12);
    }
  }
}

TEST_CASE("condition report at b = 0") {
  const Problem p = build_problem(maxcut(erdos_renyi(8, 0.5, 3), 3), ChainKind::kTranspositionWalk, {});
  const double gap = 0.3;
  const auto r = condition_report(p, 0.5, 0.0, gap);
  CHECK(r.predicted_exponent == 0.5);
  CHECK(r.omega_source == "delta");
  CHECK(r.omega_used == gap);
  CHECK(r.b_star_poinc == doctest::Approx(b_star_poincare(gap)));
  CHECK(to_json(r).find("\"omega_source\":\"delta\"") != std::string::npos);
}
