#include "splab/shortpath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "splab/error.hpp"

namespace splab {

double g_eta(double x, double eta) noexcept { return std::min(0.0, (x + 1.0 - eta) / eta); }

namespace {

void check_eta(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw ValidationError("eta must lie in (0, 1)");
}

void check_b(double b) {
  if (!(b >= 0.0) || !std::isfinite(b)) throw ValidationError("b must be a finite nonnegative number");
}

// Normalized indicator of the minimizer set.
double indicator_scale(const EnergySummary& s) { return 1.0 / std::sqrt(static_cast<double>(s.minimizers.size())); }

}  // namespace

std::vector<double> hb_diagonal(const std::vector<double>& energies, double e_star, double b, double eta) {
  check_eta(eta);
  check_b(b);
  if (!(e_star < 0.0)) throw InvariantBreach("short-path diagonal needs E* < 0");
  const double scale = std::abs(e_star);
  std::vector<double> d(energies.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = b * g_eta(energies[i] / scale, eta);
  return d;
}

SparseMatrix assemble_Hb(const SparseMatrix& d, const EnergySummary& summary, double b, double eta) {
  if (summary.energies.size() != d.dim()) throw ValidationError("energy vector does not match the discriminant");
  const auto diag = hb_diagonal(summary.energies, summary.e_star, b, eta);
  if (b == 0.0) return d.scaled_plus_diagonal(-1.0, {});
  return d.scaled_plus_diagonal(-1.0, diag);
}

StateSpacePtr space_for(ChainKind kind, const CostSpec& cost, const SpaceLimits& limits) {
  const int n = cost.graph.n;
  switch (required_space(kind)) {
    case SpaceKind::kHammingSlice: {
      int k = cost.k;
      if (cost.kind == CostKind::kMaxBisection && k < 0) k = n / 2;
      if (k < 0) throw ValidationError("transposition walk needs a Hamming weight k");
      return std::make_shared<const StateSpace>(StateSpace::hamming_slice(n, k, limits));
    }
    case SpaceKind::kIndependentSets:
      return std::make_shared<const StateSpace>(StateSpace::independent_sets(cost.graph, limits));
    case SpaceKind::kHypercube: return std::make_shared<const StateSpace>(StateSpace::hypercube(n, limits));
  }
  return nullptr;
}

Problem build_problem(const CostSpec& cost, ChainKind kind, const ChainParams& params, const ProblemOptions& opts,
                      const SpaceLimits& limits) {
  cost.validate();
  if (cost.natural_space() != SpaceKind::kHypercube && cost.natural_space() != required_space(kind))
    throw PairingError(std::string(to_string(cost.kind)) + " cost cannot be paired with " +
                       std::string(to_string(kind)));
  Problem p;
  p.space = space_for(kind, cost, limits);
  p.chain = std::make_shared<const Chain>(kind, p.space, cost.graph, params);
  p.pi = stationary(*p.chain);
  p.cost = opts.mean_center ? mean_centered(cost, *p.space, p.pi.pi) : cost;
  p.summary = ground_truth(p.cost, *p.space, p.pi.pi);
  if (opts.discriminant) {
    if (opts.discriminant->dim() != p.space->size()) throw ValidationError("shared discriminant has the wrong size");
    p.d = opts.discriminant;
  } else {
    p.d = std::make_shared<const SparseMatrix>(discriminant(*p.chain, p.pi));
  }
  p.sqrt_pi = p.pi.sqrt_pi();
  return p;
}

double ShortPathMetrics::runtime(double gap_d, double gap_hb, double overlap_init, double overlap_opt) noexcept {
  const double gap = std::min(gap_d, gap_hb);
  if (!(gap > 0.0) || !(overlap_init > 0.0) || !(overlap_opt > 0.0)) return std::numeric_limits<double>::infinity();
  return (1.0 / gap) * (1.0 / overlap_init + 1.0 / overlap_opt);
}

SpectralResult discriminant_spectrum(const Problem& p, const EigenOptions& eig) {
  ShiftedOperator neg_d(*p.d, -1.0, std::vector<double>(p.size(), 0.0));
  EigenOptions o = eig;
  if (o.guess.empty()) o.guess = p.sqrt_pi;
  o.nev = 2;
  return lowest_two_eigs(neg_d, o);
}

double absolute_gap_dense(const Problem& p) {
  if (p.size() > 4096) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> values;
  dense_eigh(p.d->to_dense(), p.size(), values, nullptr);
  double worst = 0.0;
  for (double v : values)
    if (std::abs(std::abs(v) - 1.0) > 1e-10) worst = std::max(worst, std::abs(v));
  return 1.0 - worst;
}

Profile profile(const Problem& p, double b, double eta, double gap_d, const ProfileOptions& opts) {
  check_eta(eta);
  check_b(b);
  ShiftedOperator hb(*p.d, -1.0, hb_diagonal(p.summary.energies, p.summary.e_star, b, eta));
  EigenOptions eo = opts.eig;
  eo.nev = 2;
  eo.guess = !opts.guess.empty() ? opts.guess : p.sqrt_pi;
  SpectralResult r = lowest_two_eigs(hb, eo);

  Profile out;
  auto& m = out.metrics;
  m.b = b;
  m.eta = eta;
  m.e_b = r.lambda0;
  m.gap_d = gap_d;
  m.degenerate = r.degenerate;
  m.gap_hb = r.gap();
  m.residual = std::max(r.residual0, r.residual1);
  const double a0 = dot(p.sqrt_pi, r.ground);
  if (!r.degenerate) {
    m.overlap_init = std::abs(a0);
    double s = 0.0;
    for (auto i : p.summary.minimizers) s += r.ground[i] * r.ground[i];
    m.overlap_opt = std::sqrt(s);
  } else {
    // Ground space is two-dimensional: use the projection of sqrt(pi) onto it.
    const double a1 = dot(p.sqrt_pi, r.second);
    const double proj = std::hypot(a0, a1);
    m.overlap_init = proj;
    double s = 0.0;
    if (proj > 0.0) {
      for (auto i : p.summary.minimizers) {
        const double v = (a0 * r.ground[i] + a1 * r.second[i]) / proj;
        s += v * v;
      }
    }
    m.overlap_opt = std::sqrt(s);
  }
  m.trace_dist = std::sqrt(std::max(0.0, 1.0 - m.overlap_init * m.overlap_init));
  m.eff_runtime = ShortPathMetrics::runtime(m.gap_d, m.gap_hb, m.overlap_init, m.overlap_opt);
  if (opts.keep_ground) {
    out.ground = std::move(r.ground);
    out.second = std::move(r.second);
  }
  return out;
}

Profile profile(const Problem& p, double b, double eta, const ProfileOptions& opts) {
  const SpectralResult d = discriminant_spectrum(p, opts.eig);
  return profile(p, b, eta, d.gap(), opts);
}

double overlap_init_at(const Problem& p, double b, double eta, const EigenOptions& eig, std::vector<double>* warm) {
  ShiftedOperator hb(*p.d, -1.0, hb_diagonal(p.summary.energies, p.summary.e_star, b, eta));
  EigenOptions eo = eig;
  eo.nev = 1;
  eo.guess = (warm && warm->size() == p.size()) ? *warm : p.sqrt_pi;
  SpectralResult r = lowest_two_eigs(hb, eo);
  const double ov = std::abs(dot(p.sqrt_pi, r.ground));
  if (warm) *warm = std::move(r.ground);
  return ov;
}

PhaseResult phase_transition_b(const Problem& p, double eta, const PhaseOptions& opts) {
  check_eta(eta);
  if (!(opts.b_lo >= 0.0 && opts.b_hi > opts.b_lo)) throw ValidationError("phase search needs 0 <= b_lo < b_hi");
  if (!(opts.tol > 0.0)) throw ValidationError("phase search tolerance must be positive");
  PhaseResult res;
  std::vector<double> warm;
  auto eval = [&](double b) {
    const double ov = overlap_init_at(p, b, eta, opts.eig, &warm);
    res.trajectory.emplace_back(b, ov);
    return ov;
  };
  const double f_lo = eval(opts.b_lo);
  if (f_lo < opts.threshold)
    throw ValidationError("overlap at b_lo is already below the threshold (" + format_double(f_lo) + ")");
  if (eval(opts.b_hi) >= opts.threshold) {
    res.b = opts.b_hi;
    res.saturated = true;
    return res;
  }
  double lo = opts.b_lo, hi = opts.b_hi;
  while (hi - lo > opts.tol) {
    const double mid = 0.5 * (lo + hi);
    (eval(mid) >= opts.threshold ? lo : hi) = mid;
  }
  res.b = hi;

  // The bisection assumes overlap decreases in b; verify on what was sampled.
  auto sorted = res.trajectory;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].second > sorted[i - 1].second + 1e-9) res.nonmonotone = true;
  if (!res.nonmonotone) return res;

  // Fallback: first crossing on a uniform grid, refined by bisection inside that cell.
  double prev = opts.b_lo;
  for (double b = opts.b_lo + opts.grid_step; b <= opts.b_hi + 1e-12; b += opts.grid_step) {
    if (eval(b) < opts.threshold) {
      lo = prev;
      hi = b;
      while (hi - lo > opts.tol) {
        const double mid = 0.5 * (lo + hi);
        (eval(mid) >= opts.threshold ? lo : hi) = mid;
      }
      res.b = hi;
      return res;
    }
    prev = b;
  }
  res.b = opts.b_hi;
  return res;
}

RuntimeOptimum runtime_optimal_b(const Problem& p, double eta, const std::vector<double>& grid,
                                 const ProfileOptions& opts) {
  if (grid.empty()) throw ValidationError("runtime grid is empty");
  for (double b : grid) check_b(b);
  const SpectralResult d = discriminant_spectrum(p, opts.eig);
  RuntimeOptimum best;
  bool found = false;
  for (double b : grid) {
    try {
      const Profile pr = profile(p, b, eta, d.gap(), opts);
      const auto& m = pr.metrics;
      if (!found || m.eff_runtime < best.metrics.eff_runtime ||
          (m.eff_runtime == best.metrics.eff_runtime && b < best.b)) {
        best.b = b;
        best.metrics = m;
        found = true;
      }
    } catch (const ConvergenceError& e) {
      best.warnings.push_back("b=" + format_double(b) + ": " + e.what());
    }
  }
  if (!found) throw ConvergenceError("no grid point converged", NAN, NAN);
  return best;
}

double approx_projector_overlap(const Problem& p, double b, double eta, long ell, double e_b) {
  if (ell < 0 || ell > kProjectorPowerBudget)
    throw ValidationError("projector power must lie in [0, " + std::to_string(kProjectorPowerBudget) + "]");
  if (!(std::abs(e_b) > 0.0)) throw ValidationError("projector normalization |E_b| must be positive");
  ShiftedOperator hb(*p.d, -1.0, hb_diagonal(p.summary.energies, p.summary.e_star, b, eta));
  std::vector<double> v(p.size(), 0.0), w(p.size());
  const double scale = indicator_scale(p.summary);
  for (auto i : p.summary.minimizers) v[i] = scale;
  const double inv = 1.0 / std::abs(e_b);
  for (long t = 0; t < ell; ++t) {
    hb.apply(v.data(), w.data());
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] * inv;
  }
  return dot(p.sqrt_pi, v);
}

double ground_target_overlap(const Problem& p, const std::vector<double>& ground) {
  double s = 0.0;
  for (auto i : p.summary.minimizers) s += ground[i];
  return s * indicator_scale(p.summary);
}

EnergyShiftReport energy_shift_check(const ShortPathMetrics& m, const EnergySummary& s, double gamma, double theta) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in (0, 1]");
  if (!(theta > 0.0)) throw ValidationError("theta must be positive");
  EnergyShiftReport r;
  r.lhs = std::abs(m.e_b);
  r.rhs = 1.0 + 4.0 * std::pow(s.pi_estar, gamma) / theta;
  r.pass = r.lhs < r.rhs;
  r.precondition = m.gap_hb >= theta;
  return r;
}

TraceDistanceFinding trace_distance_check(const ShortPathMetrics& m, const EnergySummary& s, double gamma) {
  TraceDistanceFinding f;
  f.measured = m.trace_dist;
  f.bound = 10.0 / m.gap_d * std::pow(s.pi_estar, gamma / 2.0);
  f.applicable = m.gap_hb >= m.gap_d / 2.0;
  f.within = f.measured <= f.bound;
  return f;
}

}  // namespace splab
