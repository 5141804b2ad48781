#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "splab/chains.hpp"
#include "splab/cost.hpp"
#include "splab/eigensolver.hpp"
#include "splab/sparse.hpp"

namespace splab {

/// g_eta(x) = min(0, (x + 1 - eta) / eta).
double g_eta(double x, double eta) noexcept;

/// Diagonal b * g_eta(H(z)/|E*|) over the space.
std::vector<double> hb_diagonal(const std::vector<double>& energies, double e_star, double b, double eta);

/// H_b = -D + diag(b * g_eta(H/|E*|)). At b = 0 this is exactly -D.
SparseMatrix assemble_Hb(const SparseMatrix& d, const EnergySummary& summary, double b, double eta);

/// Everything derived once per (instance, chain) and shared by every b.
struct Problem {
  StateSpacePtr space;
  std::shared_ptr<const Chain> chain;
  StationaryDist pi;
  CostSpec cost;
  EnergySummary summary;
  std::shared_ptr<const SparseMatrix> d;  // discriminant D(P)
  std::vector<double> sqrt_pi;

  std::size_t size() const noexcept { return space->size(); }
};

struct ProblemOptions {
  /// Subtract E_pi[H] from the cost before anything else.
  bool mean_center = false;
  /// Reuse a discriminant already built for an identical chain.
  std::shared_ptr<const SparseMatrix> discriminant;
};

/// Builds the space, chain, stationary law, ground truth and D(P).
Problem build_problem(const CostSpec& cost, ChainKind kind, const ChainParams& params,
                      const ProblemOptions& opts = {}, const SpaceLimits& limits = {});

/// Space matching a chain kind for the given cost (slice k, conflict graph, ...).
StateSpacePtr space_for(ChainKind kind, const CostSpec& cost, const SpaceLimits& limits = {});

struct ShortPathMetrics {
  double b = 0.0;
  double eta = 0.5;
  double overlap_init = 0.0;
  double overlap_opt = 0.0;
  double gap_hb = 0.0;
  double gap_d = 0.0;
  double e_b = 0.0;
  double eff_runtime = 0.0;
  double trace_dist = 0.0;
  bool degenerate = false;
  double residual = 0.0;

  /// Recomputes eff_runtime from the other fields.
  static double runtime(double gap_d, double gap_hb, double overlap_init, double overlap_opt) noexcept;
};

struct ProfileOptions {
  EigenOptions eig;
  /// Keep the ground vector of H_b in the result.
  bool keep_ground = false;
  /// Warm start for the ground vector.
  std::vector<double> guess;
};

struct Profile {
  ShortPathMetrics metrics;
  std::vector<double> ground;
  std::vector<double> second;
};

/// Spectrum of -D (cached by the caller if reused).
SpectralResult discriminant_spectrum(const Problem& p, const EigenOptions& eig = {});

/// 1 - max |lambda| over the spectrum of D(P) with +-1 excluded; NaN if not available.
double absolute_gap_dense(const Problem& p);

Profile profile(const Problem& p, double b, double eta, double gap_d, const ProfileOptions& opts = {});
Profile profile(const Problem& p, double b, double eta, const ProfileOptions& opts = {});

/// Overlap with sqrt(pi) of the ground state of H_b (single eigenpair).
double overlap_init_at(const Problem& p, double b, double eta, const EigenOptions& eig, std::vector<double>* warm);

struct PhaseResult {
  double b = 0.0;
  bool saturated = false;
  bool nonmonotone = false;
  std::vector<std::pair<double, double>> trajectory;  // (b, overlap_init) in evaluation order
};

struct PhaseOptions {
  double threshold = 0.99;
  double b_lo = 0.0;
  double b_hi = 2.0;
  double tol = 1e-3;
  double grid_step = 0.01;  // fallback scan resolution
  EigenOptions eig;
};

PhaseResult phase_transition_b(const Problem& p, double eta, const PhaseOptions& opts = {});

struct RuntimeOptimum {
  double b = 0.0;
  ShortPathMetrics metrics;
  std::vector<std::string> warnings;
};

RuntimeOptimum runtime_optimal_b(const Problem& p, double eta, const std::vector<double>& grid,
                                 const ProfileOptions& opts = {});

inline constexpr long kProjectorPowerBudget = 1000000;

/// <sqrt(pi)| (H_b/|E_b|)^ell |z*> with z* the normalized minimizer indicator.
double approx_projector_overlap(const Problem& p, double b, double eta, long ell, double e_b);

/// <psi_b|z*> for the same normalized indicator.
double ground_target_overlap(const Problem& p, const std::vector<double>& ground);

struct EnergyShiftReport {
  double lhs = 0.0;  // |E_b|
  double rhs = 0.0;  // 1 + 4 pi(E*)^gamma / theta
  bool pass = false;
  bool precondition = false;  // gap_Hb >= theta
};

EnergyShiftReport energy_shift_check(const ShortPathMetrics& m, const EnergySummary& s, double gamma, double theta);

struct TraceDistanceFinding {
  double measured = 0.0;
  double bound = 0.0;  // 10 * pi(E*)^(gamma/2) / gap_D
  bool applicable = false;  // gap_Hb >= gap_D / 2
  bool within = false;
};

TraceDistanceFinding trace_distance_check(const ShortPathMetrics& m, const EnergySummary& s, double gamma);

}  // namespace splab
