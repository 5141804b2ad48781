#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "splab/chains.hpp"
#include "splab/cost.hpp"
#include "splab/rng.hpp"

namespace splab {

struct SearchOutcome {
  SpinConfig best_state;
  double best_energy = 0.0;
  std::uint64_t samples_used = 0;
  bool hit_optimum = false;
  std::uint64_t steps_per_sample = 0;
};

/// Simulates `steps` transitions from x0 (which must be feasible).
SpinConfig run_chain(const Chain& chain, const SpinConfig& x0, std::uint64_t steps, Rng& rng);

/// Default thinning: n ceil(ln n) 10 for single-site chains, k(n-k)/n ceil(ln C(n,k)) 10 for transpositions.
std::uint64_t default_steps_per_sample(const Chain& chain, double factor = 10.0);

struct SearchOptions {
  std::uint64_t budget = 1;
  std::uint64_t steps_per_sample = 0;  // 0 selects the default
  /// Stop at the first sample reaching a known minimizer (needs `summary`).
  bool oracle = true;
};

/// Markov Chain Search: repeatedly advance the chain and keep the running minimum.
SearchOutcome markov_chain_search(const Chain& chain, const CostSpec& cost, const SpinConfig& x0,
                                  const EnergySummary* summary, const SearchOptions& opts, Rng& rng);

struct AdvantageReport {
  double ratio = 0.0;          // pi_beta(E*) 2^n
  double advantage_bound = 0.0;    // 1 / (exp(-beta eta |E*|)/2 + 2^(-gamma n))
  double gamma_uniform = 0.0;  // from the uniform tail below (1-eta)E*
};

/// Exact Gibbs-versus-uniform advantage on a hypercube cost.
AdvantageReport gibbs_vs_uniform_advantage(const CostSpec& cost, double beta, double eta);

}  // namespace splab
