#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "splab/sparse.hpp"

namespace splab {

enum class EigenMethod { kLanczos, kDense };
enum class EigenStrategy { kAuto, kLanczos, kDense };

std::string_view to_string(EigenMethod m);

inline constexpr double kDegenerateGap = 1e-10;

struct EigenOptions {
  /// Residual tolerance; negative selects 1e-10 * ||A||_1.
  double tol = -1.0;
  /// Matrix-vector product budget per eigenpair.
  int max_iter = 5000;
  /// 1 computes only the ground pair (lambda1 and residual1 are then NaN).
  int nev = 2;
  EigenStrategy strategy = EigenStrategy::kAuto;
  /// kAuto solves densely up to this dimension.
  std::size_t dense_cutoff = 32;
  /// On Lanczos non-convergence, dimensions up to this fall back to dense.
  std::size_t dense_fallback = 2048;
  /// Bytes allowed for the Krylov basis; sets the restart length.
  std::size_t basis_budget = std::size_t{768} << 20;
  /// Optional start vector for the ground pair.
  std::vector<double> guess;
  std::uint64_t seed = 0x5eed;
};

struct SpectralResult {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  std::vector<double> ground;
  std::vector<double> second;
  double residual0 = 0.0;
  double residual1 = 0.0;
  int iterations = 0;
  EigenMethod method = EigenMethod::kLanczos;
  /// lambda1 - lambda0 below kDegenerateGap.
  bool degenerate = false;

  double gap() const noexcept { return degenerate ? 0.0 : lambda1 - lambda0; }
};

/// Two lowest eigenpairs of a symmetric operator. The ground vector is
/// sign-normalized so its entries sum to a nonnegative value.
SpectralResult lowest_two_eigs(const LinearOperator& a, const EigenOptions& opts = {});

/// Same, rejecting matrices that are not symmetric.
SpectralResult lowest_two_eigs(const SparseMatrix& a, const EigenOptions& opts = {});

/// Full dense spectrum (ascending) and row-major eigenvectors (columns).
void dense_eigh(const std::vector<double>& a, std::size_t dim, std::vector<double>& values,
                std::vector<double>* vectors);

}  // namespace splab
