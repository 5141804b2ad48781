#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "splab/instances.hpp"
#include "splab/statespace.hpp"

namespace splab {

/// One CSP clause: `vars` (at most 6) and the set of satisfying local
/// assignments as a bitmask over 2^|vars| patterns. Pattern bit t of the
/// mask refers to the assignment where var[j] takes bit j of t.
struct CspConstraint {
  std::vector<int> vars;
  std::uint64_t satisfying = 0;

  int arity() const noexcept { return static_cast<int>(vars.size()); }
  int num_satisfying() const noexcept { return __builtin_popcountll(satisfying); }
  bool satisfied(std::uint64_t bits) const noexcept;
};

/// A cost Hamiltonian over configurations of `graph.n` sites.
///
/// Conventions: maxcut kinds read bit b as spin 2b-1 and give minus the cut
/// weight; mis and mis-penalized read bits as occupations; ising and sk
/// read bits as spins. `shift` is subtracted from every energy.
struct CostSpec {
  CostKind kind = CostKind::kMaxCutHamming;
  Graph graph;
  int k = -1;
  double rho = 0.0;
  double field = 0.0;
  double shift = 0.0;

  /// csp-penalized: clauses and the normalization max|H_base| of the base
  /// maxcut objective (filled by make_csp_cost).
  std::vector<CspConstraint> constraints;
  double base_norm = 1.0;

  /// True when the unshifted energy is an exact integer for every state.
  bool integral() const noexcept;
  /// The space kind this cost lives on.
  SpaceKind natural_space() const noexcept;
  void validate() const;
};

CostSpec make_cost(const InstanceSpec& spec, const Graph& g);
/// Builds the normalized penalized objective; enumerates the hypercube for max|H|.
CostSpec make_csp_cost(const Graph& g, std::vector<CspConstraint> constraints);

/// Precomputed evaluator (neighbour masks, scaled couplings).
class EnergyEvaluator {
 public:
  explicit EnergyEvaluator(const CostSpec& cost);

  double operator()(std::uint64_t bits) const noexcept { return raw(bits) - shift_; }
  double raw(std::uint64_t bits) const noexcept;
  /// Exact unshifted integer energy; only meaningful when integral().
  std::int64_t integer(std::uint64_t bits) const noexcept;
  bool integral() const noexcept { return integral_; }
  const CostSpec& spec() const noexcept { return cost_; }

 private:
  CostSpec cost_;
  std::vector<std::uint64_t> masks_;
  std::vector<double> couplings_;
  bool integral_ = false;
  bool unit_weights_ = true;
  double shift_ = 0.0;
};

double eval_energy(const CostSpec& cost, const SpinConfig& z);

struct EnergySummary {
  double e_star = 0.0;
  std::vector<std::size_t> minimizers;
  double pi_estar = 0.0;
  double mean_pi = 0.0;
  /// Energy of every state in space order (shift applied).
  std::vector<double> energies;
};

/// Exhaustive enumeration. `pi` holds normalized probabilities in space
/// order. Throws InvariantBreach when e_star is not negative.
EnergySummary ground_truth(const CostSpec& cost, const StateSpace& space, const std::vector<double>& pi);

/// Same enumeration, but with the invariant check left to the caller.
EnergySummary enumerate_energies(const CostSpec& cost, const StateSpace& space, const std::vector<double>& pi);

/// Mean of maxcut-hamming energy under the uniform slice distribution.
double mean_energy_closed_form(const CostSpec& cost, int k);

/// Returns a copy whose shift equals the stationary mean, so E_pi[H] = 0.
CostSpec mean_centered(const CostSpec& cost, const StateSpace& space, const std::vector<double>& pi);

}  // namespace splab
