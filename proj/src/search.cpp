#include "splab/search.hpp"

#include <algorithm>
#include <cmath>

#include "splab/error.hpp"

namespace splab {

SpinConfig run_chain(const Chain& chain, const SpinConfig& x0, std::uint64_t steps, Rng& rng) {
  const auto& space = chain.space();
  if (x0.n != space.n() || !space.contains(x0.bits)) throw MembershipError("start state is not feasible");
  std::uint64_t x = x0.bits;
  for (std::uint64_t t = 0; t < steps; ++t) {
    x = chain.step(x, rng);
#ifndef NDEBUG
    if (!space.contains(x)) throw InvariantBreach("chain left its feasible space");
#endif
  }
  return {x, x0.n};
}

std::uint64_t default_steps_per_sample(const Chain& chain, double factor) {
  const int n = chain.n();
  const double logn = std::ceil(std::log(std::max(n, 2)));
  if (chain.kind() == ChainKind::kTranspositionWalk) {
    const int k = chain.space().k();
    const double logc = std::ceil(std::log(std::max<double>(2.0, static_cast<double>(binomial(n, k)))));
    return static_cast<std::uint64_t>(std::max(1.0, std::ceil(k * (n - k) / static_cast<double>(n) * logc * factor)));
  }
  return static_cast<std::uint64_t>(std::max(1.0, n * logn * factor));
}

SearchOutcome markov_chain_search(const Chain& chain, const CostSpec& cost, const SpinConfig& x0,
                                  const EnergySummary* summary, const SearchOptions& opts, Rng& rng) {
  if (opts.budget < 1) throw ValidationError("search budget must be at least 1");
  const auto& space = chain.space();
  if (x0.n != space.n() || !space.contains(x0.bits)) throw MembershipError("start state is not feasible");
  if (opts.oracle && !summary) throw ValidationError("oracle mode needs the ground truth");
  const EnergyEvaluator eval(cost);
  std::vector<std::size_t> minimizers;
  if (summary) {
    minimizers = summary->minimizers;
    std::sort(minimizers.begin(), minimizers.end());
  }
  auto is_optimal = [&](std::uint64_t x) {
    return std::binary_search(minimizers.begin(), minimizers.end(), space.rank(x));
  };

  SearchOutcome out;
  out.steps_per_sample = opts.steps_per_sample ? opts.steps_per_sample : default_steps_per_sample(chain);
  std::uint64_t x = x0.bits;
  out.best_state = x0;
  bool first = true;
  for (std::uint64_t s = 0; s < opts.budget; ++s) {
    for (std::uint64_t t = 0; t < out.steps_per_sample; ++t) x = chain.step(x, rng);
    ++out.samples_used;
    const double e = eval(x);
    if (first || e < out.best_energy) {
      out.best_energy = e;
      out.best_state = {x, x0.n};
      first = false;
    }
    if (summary && is_optimal(x)) {
      out.hit_optimum = true;
      if (opts.oracle) break;
    }
  }
  return out;
}

AdvantageReport gibbs_vs_uniform_advantage(const CostSpec& cost, double beta, double eta) {
  if (!(beta >= 0.0)) throw ValidationError("beta must be nonnegative");
  const int n = cost.graph.n;
  const StateSpace space = StateSpace::hypercube(n);
  std::vector<double> uniform(space.size(), 1.0 / static_cast<double>(space.size()));
  const EnergySummary s = ground_truth(cost, space, uniform);
  std::vector<double> logw(space.size());
  for (std::size_t i = 0; i < logw.size(); ++i) logw[i] = -beta * s.energies[i];
  const double mx = *std::max_element(logw.begin(), logw.end());
  long double z = 0.0L;
  for (double v : logw) z += std::exp(static_cast<long double>(v - mx));
  const double log_z = mx + static_cast<double>(std::log(z));
  long double mass = 0.0L;
  for (auto i : s.minimizers) mass += std::exp(static_cast<long double>(logw[i] - log_z));

  AdvantageReport r;
  r.ratio = static_cast<double>(mass * std::ldexp(1.0L, n));
  double tail = 0.0;
  for (std::size_t i = 0; i < s.energies.size(); ++i)
    if (s.energies[i] <= (1.0 - eta) * s.e_star) tail += uniform[i];
  r.gamma_uniform = -std::log2(tail) / n;
  r.advantage_bound = 1.0 / (0.5 * std::exp(-beta * eta * std::abs(s.e_star)) + std::exp2(-r.gamma_uniform * n));
  return r;
}

}  // namespace splab
