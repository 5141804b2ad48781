#include "splab/eigensolver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "splab/error.hpp"
#include "splab/instances.hpp"
#include "splab/rng.hpp"

namespace splab {

std::string_view to_string(EigenMethod m) { return m == EigenMethod::kLanczos ? "lanczos" : "dense"; }

void dense_eigh(const std::vector<double>& a, std::size_t dim, std::vector<double>& values,
                std::vector<double>* vectors) {
  Eigen::MatrixXd m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) m(r, c) = 0.5 * (a[r * dim + c] + a[c * dim + r]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", NAN, NAN);
  values.assign(es.eigenvalues().data(), es.eigenvalues().data() + dim);
  if (vectors) {
    vectors->resize(dim * dim);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) (*vectors)[r * dim + c] = es.eigenvectors()(r, c);
  }
}

namespace {

struct Pair {
  double value = 0.0;
  std::vector<double> vec;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void project_out(const std::vector<const std::vector<double>*>& basis, std::vector<double>& w) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto* q : basis) axpy(-dot(*q, w), *q, w);
}

double residual_norm(const LinearOperator& a, const std::vector<double>& v, double lambda, std::vector<double>& tmp) {
  a.apply(v.data(), tmp.data());
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = tmp[i] - lambda * v[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::vector<double> random_unit(std::size_t dim, Rng& rng) {
  std::vector<double> v(dim);
  for (auto& x : v) x = rng.uniform() - 0.5;
  const double nv = norm2(v);
  for (auto& x : v) x /= nv;
  return v;
}

// Lowest eigenpair of (I - YY^T) A (I - YY^T) restricted to span(Y)^perp.
// Lanczos with partial reorthogonalization: the loss of orthogonality is
// tracked with the omega recurrence and the basis is reorthogonalized (two
// passes, on two consecutive steps) only when it exceeds sqrt(eps). A full
// basis triggers an explicit restart from the best Ritz vector.
Pair lanczos_lowest(const LinearOperator& a, std::vector<double> start, const std::vector<const std::vector<double>*>& deflate,
                    double tol, int max_iter, std::size_t max_basis, Rng& rng) {
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const double kSqrtEps = std::sqrt(kEps);
  const std::size_t dim = a.dim();
  const double anorm = std::max(a.norm1(), 1e-300);
  const double psi = kEps * std::sqrt(static_cast<double>(dim));
  Pair best;
  std::vector<double> tmp(dim);
  int used = 0;
  for (int restart = 0;; ++restart) {
    project_out(deflate, start);
    double sn = norm2(start);
    if (sn < 1e-8) {
      start = random_unit(dim, rng);
      project_out(deflate, start);
      sn = norm2(start);
    }
    for (auto& x : start) x /= sn;

    std::vector<std::vector<double>> v;
    std::vector<double> alpha, beta;
    std::vector<double> omega_prev, omega_cur{1.0}, omega_next;
    bool force_reorth = false;
    v.push_back(std::move(start));
    bool stop = false;
    while (!stop) {
      const std::size_t j = v.size() - 1;
      std::vector<double> w(dim);
      a.apply(v[j].data(), w.data());
      ++used;
      project_out(deflate, w);
      if (j > 0) axpy(-beta[j - 1], v[j - 1], w);
      double aj = dot(v[j], w);
      axpy(-aj, v[j], w);
      const double fix = dot(v[j], w);  // local correction
      axpy(-fix, v[j], w);
      aj += fix;
      alpha.push_back(aj);
      double bj = norm2(w);

      // omega recurrence for the inner products of the next vector with the basis
      omega_next.assign(j + 2, 0.0);
      double worst = 0.0;
      if (bj > 0.0) {
        for (std::size_t k = 0; k < j; ++k) {
          double t = beta[k] * omega_cur[k + 1] + (alpha[k] - aj) * omega_cur[k];
          if (k > 0) t += beta[k - 1] * omega_cur[k - 1];
          if (j > 0) t -= beta[j - 1] * omega_prev[k];
          t += std::copysign(kEps * (beta[k] + bj) * 0.3, t);
          omega_next[k] = t / bj;
          worst = std::max(worst, std::abs(omega_next[k]));
        }
      }
      omega_next[j] = psi;
      omega_next[j + 1] = 1.0;
      if (force_reorth || worst > kSqrtEps) {
        for (int pass = 0; pass < 2; ++pass)
          for (const auto& q : v) axpy(-dot(q, w), q, w);
        project_out(deflate, w);
        bj = norm2(w);
        for (std::size_t k = 0; k <= j; ++k) omega_next[k] = psi;
        force_reorth = !force_reorth;
      }
      const bool invariant = bj <= 1e-13 * anorm;

      const auto m = static_cast<Eigen::Index>(alpha.size());
      const bool exhausted = static_cast<std::size_t>(m) >= dim - deflate.size();
      const bool check = invariant || m < 40 || m % 5 == 0 || v.size() >= max_basis || used >= max_iter || exhausted;
      if (check) {
        Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
        Eigen::VectorXd e(std::max<Eigen::Index>(m - 1, 0));
        for (Eigen::Index t = 0; t + 1 < m; ++t) e[t] = beta[t];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
        const double est = std::abs(bj * es.eigenvectors()(m - 1, 0));
        if (est <= tol || invariant || exhausted || v.size() >= max_basis || used >= max_iter) {
          std::vector<double> ritz(dim, 0.0);
          for (Eigen::Index t = 0; t < m; ++t) axpy(es.eigenvectors()(t, 0), v[t], ritz);
          project_out(deflate, ritz);
          const double rn = norm2(ritz);
          for (auto& x : ritz) x /= rn;
          a.apply(ritz.data(), tmp.data());
          const double lam = dot(ritz, tmp);
          const double res = residual_norm(a, ritz, lam, tmp);
          used += 2;
          if (res < best.residual) {
            best.value = lam;
            best.vec = ritz;
            best.residual = res;
          }
          if (res <= tol || ((invariant || exhausted) && res <= std::max(tol, 1e-12 * anorm))) {
            best.converged = true;
            best.iterations = used;
            return best;
          }
          if (used >= max_iter) {
            best.iterations = used;
            return best;
          }
          // A converged estimate with a larger true residual means the basis lost
          // orthogonality; a short fresh run from the Ritz vector cleans it up.
          if (v.size() >= max_basis || invariant || exhausted || est <= tol) {
            start = best.vec;
            if (invariant || exhausted) axpy(1e-6, random_unit(dim, rng), start);
            stop = true;
            continue;
          }
        }
      }
      beta.push_back(bj);
      for (auto& x : w) x /= bj;
      v.push_back(std::move(w));
      omega_prev = std::move(omega_cur);
      omega_cur = std::move(omega_next);
    }
  }
}

SpectralResult dense_result(const LinearOperator& a, int nev) {
  const std::size_t dim = a.dim();
  std::vector<double> values, vectors;
  dense_eigh(to_dense(a), dim, values, &vectors);
  SpectralResult r;
  r.method = EigenMethod::kDense;
  r.lambda0 = values[0];
  r.ground.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) r.ground[i] = vectors[i * dim];
  std::vector<double> tmp(dim);
  r.residual0 = residual_norm(a, r.ground, r.lambda0, tmp);
  if (nev >= 2 && dim >= 2) {
    r.lambda1 = values[1];
    r.second.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) r.second[i] = vectors[i * dim + 1];
    r.residual1 = residual_norm(a, r.second, r.lambda1, tmp);
  } else {
    r.lambda1 = std::numeric_limits<double>::quiet_NaN();
    r.residual1 = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

void sign_normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  if (s < 0.0)
    for (auto& x : v) x = -x;
}

}  // namespace

SpectralResult lowest_two_eigs(const LinearOperator& a, const EigenOptions& opts) {
  const std::size_t dim = a.dim();
  if (dim < 1) throw ValidationError("eigensolver needs a nonempty operator");
  if (opts.nev < 1 || opts.nev > 2) throw ValidationError("eigensolver computes one or two eigenpairs");
  if (opts.max_iter < 1) throw ValidationError("eigensolver iteration budget must be positive");
  const double tol = opts.tol > 0.0 ? opts.tol : 1e-10 * std::max(a.norm1(), 1e-300);

  SpectralResult r;
  const bool dense = opts.strategy == EigenStrategy::kDense ||
                     (opts.strategy == EigenStrategy::kAuto && dim <= opts.dense_cutoff) || dim < 2;
  if (dense) {
    r = dense_result(a, opts.nev);
  } else {
    Rng rng(opts.seed);
    const std::size_t max_basis = std::clamp<std::size_t>(opts.basis_budget / (sizeof(double) * dim), 20, 400);
    std::vector<double> start = opts.guess;
    if (start.size() != dim) start = random_unit(dim, rng);
    // The ground pair is converged further: its residual floors the deflated second pair.
    Pair p0 = lanczos_lowest(a, start, {}, opts.nev == 2 ? tol / 20.0 : tol, opts.max_iter, max_basis, rng);
    Pair p1;
    if (p0.converged && opts.nev == 2) {
      sign_normalize(p0.vec);
      p1 = lanczos_lowest(a, random_unit(dim, rng), {&p0.vec}, tol, opts.max_iter, max_basis, rng);
    }
    const bool ok = p0.converged && (opts.nev == 1 || p1.converged);
    if (!ok) {
      if (dim <= opts.dense_fallback && opts.strategy == EigenStrategy::kAuto) {
        r = dense_result(a, opts.nev);
      } else {
        throw ConvergenceError("Lanczos did not converge within " + std::to_string(opts.max_iter) + " products",
                               p0.residual, opts.nev == 2 ? p1.residual : NAN);
      }
    } else {
      r.method = EigenMethod::kLanczos;
      r.lambda0 = p0.value;
      r.ground = std::move(p0.vec);
      r.residual0 = p0.residual;
      r.iterations = p0.iterations + p1.iterations;
      if (opts.nev == 2) {
        r.lambda1 = p1.value;
        r.second = std::move(p1.vec);
        r.residual1 = p1.residual;
        if (r.lambda1 < r.lambda0) {
          std::swap(r.lambda0, r.lambda1);
          std::swap(r.ground, r.second);
          std::swap(r.residual0, r.residual1);
        }
      } else {
        r.lambda1 = std::numeric_limits<double>::quiet_NaN();
        r.residual1 = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  sign_normalize(r.ground);
  if (!r.second.empty()) sign_normalize(r.second);
  r.degenerate = opts.nev == 2 && dim >= 2 && (r.lambda1 - r.lambda0) < kDegenerateGap;
  return r;
}

SpectralResult lowest_two_eigs(const SparseMatrix& a, const EigenOptions& opts) {
  const double asym = a.asymmetry();
  if (asym > 1e-12 * std::max(1.0, a.norm1()))
    throw ValidationError("eigensolver input is not symmetric (max asymmetry " + format_double(asym) + ")");
  return lowest_two_eigs(static_cast<const LinearOperator&>(a), opts);
}

}  // namespace splab
