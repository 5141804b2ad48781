#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "splab/cost.hpp"
#include "splab/rng.hpp"
#include "splab/sparse.hpp"
#include "splab/statespace.hpp"

namespace splab {

enum class ChainKind { kHypercubeWalk, kTranspositionWalk, kGlauberHardcore, kGlauberIsing, kGlauberSk };

std::string_view to_string(ChainKind k);
ChainKind parse_chain_kind(std::string_view s);
/// The only space kind each chain is defined on.
SpaceKind required_space(ChainKind k) noexcept;

struct ChainParams {
  double lambda = 1.0;  // hardcore fugacity
  double beta = 0.0;    // inverse temperature (ising, sk)
  double field = 0.0;   // uniform field h (ising)
  double zeta = 0.0;    // laziness
};

struct Transition {
  std::uint64_t to = 0;
  double prob = 0.0;
};

/// Normalized stationary distribution kept alongside its log weights.
struct StationaryDist {
  std::vector<double> log_weights;
  double log_z = 0.0;
  std::vector<double> pi;

  std::vector<double> weights() const;  // exp(log_weights)
  std::vector<double> sqrt_pi() const;
  double min_prob() const;
};

/// Reversible kernel over an enumerated space. Off-diagonal moves are
/// generated per state; the self-loop is 1 minus their sum.
class Chain {
 public:
  /// `g` supplies the hardcore conflict graph or the Ising/SK couplings
  /// (SK couplings are scaled by 1/sqrt(n)); it is ignored by the walks.
  Chain(ChainKind kind, StateSpacePtr space, const Graph& g, ChainParams params);

  ChainKind kind() const noexcept { return kind_; }
  const ChainParams& params() const noexcept { return params_; }
  const StateSpace& space() const noexcept { return *space_; }
  const StateSpacePtr& space_ptr() const noexcept { return space_; }
  int n() const noexcept { return space_->n(); }
  /// Whether P is symmetric, in which case the discriminant equals P.
  bool symmetric_kernel() const noexcept;

  void transitions(std::uint64_t x, std::vector<Transition>& out) const;
  double self_loop(std::uint64_t x) const;
  /// P(x, y) for any pair of feasible states.
  double transition_prob(std::uint64_t x, std::uint64_t y) const;
  double log_weight(std::uint64_t x) const;

  /// Energy of the chain's own Gibbs Hamiltonian (ising/sk), 0 otherwise.
  double gibbs_energy(std::uint64_t x) const;

  std::uint64_t step(std::uint64_t x, Rng& rng) const;

 private:
  double flip_delta(std::uint64_t x, int i) const;  // H(x with i flipped) - H(x)
  double move_prob(std::uint64_t x, int i) const;   // unlazy prob of flipping site i (glauber, hypercube)

  ChainKind kind_;
  StateSpacePtr space_;
  ChainParams params_;
  std::vector<std::uint64_t> masks_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  std::vector<std::pair<Edge, double>> couplings_;
};

Chain make_chain(ChainKind kind, StateSpacePtr space, const Graph& g, ChainParams params);

StationaryDist stationary(const Chain& chain);

/// Row-stochastic transition matrix (mainly for tests and small checks).
SparseMatrix transition_matrix(const Chain& chain);

/// D(P)_{xy} = sqrt(P(x,y) P(y,x)). Throws ReversibilityError when a
/// detailed-balance residual exceeds `tol`.
SparseMatrix discriminant(const Chain& chain, const StationaryDist& pi, double tol = 1e-10);

struct BalanceReport {
  double detailed_balance = 0.0;  // max |pi(x)P(x,y) - pi(y)P(y,x)|
  double row_sum = 0.0;           // max |sum_y P(x,y) - 1|
};

BalanceReport check_balance(const Chain& chain, const StationaryDist& pi);

enum class ThresholdKind { kHardcore, kIsingAntiferro };

/// Uniqueness threshold on d-regular trees: lambda_c or beta_c (d >= 3).
double critical_threshold(ThresholdKind kind, int d);

}  // namespace splab
