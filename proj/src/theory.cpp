#include "splab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include "json.hpp"

#include "splab/error.hpp"
#include "splab/eigensolver.hpp"
#include "splab/rng.hpp"

namespace splab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename Fn>
void for_each_move(const Chain& chain, Fn&& fn) {
  const auto& space = chain.space();
  std::vector<Transition> moves;
  for (std::size_t r = 0; r < space.size(); ++r) {
    const std::uint64_t x = space.unrank_bits(r);
    chain.transitions(x, moves);
    fn(r, x, moves);
  }
}

void check_sizes(const Chain& chain, const std::vector<double>& v) {
  if (v.size() != chain.space().size()) throw ValidationError("vector length does not match the chain's space");
}

double f_clamp(double x, double eta) { return std::max(0.0, (x - 1.0 + eta) / eta); }

}  // namespace

double pseudo_lipschitz(const Chain& chain, const std::vector<double>& energies) {
  check_sizes(chain, energies);
  const auto& space = chain.space();
  double worst = 0.0;
  for_each_move(chain, [&](std::size_t r, std::uint64_t, const std::vector<Transition>& moves) {
    double s = 0.0;
    for (const auto& t : moves) {
      const double d = energies[r] - energies[space.rank(t.to)];
      s += t.prob * d * d;
    }
    worst = std::max(worst, s);
  });
  return worst;
}

std::vector<double> one_step_mean(const Chain& chain, const std::vector<double>& energies) {
  check_sizes(chain, energies);
  const auto& space = chain.space();
  std::vector<double> out(energies.size());
  for_each_move(chain, [&](std::size_t r, std::uint64_t, const std::vector<Transition>& moves) {
    double s = 0.0, moved = 0.0;
    for (const auto& t : moves) {
      s += t.prob * energies[space.rank(t.to)];
      moved += t.prob;
    }
    out[r] = s + (1.0 - moved) * energies[r];
  });
  return out;
}

Stability delta_p_stability(const Chain& chain, const std::vector<double>& energies, double e_star, double eta) {
  check_sizes(chain, energies);
  if (!(eta > 0.0 && eta < 1.0)) throw ValidationError("eta must lie in (0, 1)");
  if (!(e_star < 0.0)) throw InvariantBreach("stability needs E* < 0");
  const auto& space = chain.space();
  const double scale = std::abs(e_star);
  Stability st;
  st.delta_tilde = -std::numeric_limits<double>::infinity();
  for_each_move(chain, [&](std::size_t r, std::uint64_t, const std::vector<Transition>& moves) {
    double mean_h = 0.0, mean_g = 0.0, moved = 0.0;
    for (const auto& t : moves) {
      const double e = energies[space.rank(t.to)];
      mean_h += t.prob * e;
      mean_g += t.prob * g_eta(e / scale, eta);
      moved += t.prob;
    }
    const double stay = 1.0 - moved;
    mean_h += stay * energies[r];
    mean_g += stay * g_eta(energies[r] / scale, eta);
    st.delta_tilde = std::max(st.delta_tilde, mean_h - energies[r]);
    // Smallest preimage of the averaged clamp value (covers u = 0 too).
    const double inv = scale * (std::min(mean_g, 0.0) * eta - 1.0 + eta);
    st.delta_p_eta = std::max(st.delta_p_eta, inv - energies[r]);
  });
  return st;
}

double alpha_p(double delta_p_eta, double e_star, double eta) {
  return delta_p_eta / (std::abs(e_star) * (1.0 - eta));
}

double subdepolarizing_violation(const Chain& chain, const std::vector<double>& energies, double e_star, double eta,
                                 double alpha, double c) {
  check_sizes(chain, energies);
  const auto& space = chain.space();
  double worst = -std::numeric_limits<double>::infinity();
  for_each_move(chain, [&](std::size_t r, std::uint64_t, const std::vector<Transition>& moves) {
    double lhs = 0.0, moved = 0.0;
    for (const auto& t : moves) {
      lhs += t.prob * f_clamp(c * energies[space.rank(t.to)] / e_star, eta);
      moved += t.prob;
    }
    lhs += (1.0 - moved) * f_clamp(c * energies[r] / e_star, eta);
    const double rhs = f_clamp(c * (1.0 - alpha) * energies[r] / e_star, eta);
    worst = std::max(worst, rhs - lhs);
  });
  return worst;
}

SpectralDensity spectral_density(const std::vector<double>& energies, const std::vector<double>& pi, double eta,
                                 const EnergySummary& summary) {
  if (energies.size() != pi.size()) throw ValidationError("energies and pi differ in length");
  const double cut = (1.0 - eta) * summary.e_star;
  const double slack = 1e-12 * std::abs(summary.e_star);
  long double tail = 0.0L;
  for (std::size_t i = 0; i < pi.size(); ++i)
    if (energies[i] <= cut + slack) tail += pi[i];
  SpectralDensity d;
  d.tail_mass = static_cast<double>(tail);
  if (!(d.tail_mass > 0.0)) throw InvariantBreach("tail mass is zero although minimizers lie in the tail");
  const double lp = std::log(summary.pi_estar);
  d.gamma_emp = lp < 0.0 ? std::log(d.tail_mass) / lp : 1.0;
  return d;
}

double tail_bound_gamma(TailMethod method, double constant, const EnergySummary& summary, double eta,
                        double pseudo_lip) {
  const double dev = summary.mean_pi - (1.0 - eta) * summary.e_star;
  if (!(dev > 0.0)) throw DomainError("tail bound is vacuous: (1-eta)E* is not below the stationary mean");
  if (!(constant > 0.0) || !(pseudo_lip > 0.0)) throw DomainError("tail bound needs positive constants");
  const double log_inv = -std::log(summary.pi_estar);
  if (!(log_inv > 0.0)) throw DomainError("tail bound needs pi(E*) < 1");
  if (method == TailMethod::kHerbst) return constant * dev * dev / (pseudo_lip * log_inv);
  return std::sqrt(constant) * dev / (std::sqrt(pseudo_lip) * log_inv);
}

double poincare_tail_bound(double delta, double pseudo_lip, double t) {
  return std::exp(-std::sqrt(delta) * t / std::sqrt(pseudo_lip));
}

double b_star_log_sobolev(double gamma, double omega, double pi_estar) {
  return 2.0 / 3.0 * gamma * omega * std::log(1.0 / pi_estar);
}

double b_star_poincare(double delta) { return delta * (4.0 * std::sqrt(6.0) - 1.0) / 10.0; }

ExponentPrediction predicted_exponent(double b, double eta, double e_star, double pi_estar, double delta_p) {
  ExponentPrediction p;
  if (b < 0.0) throw ValidationError("b must be nonnegative");
  const double advantage = eta * (1.0 - eta) * std::abs(e_star) * b;
  if (advantage == 0.0) return p;
  if (!(delta_p > 0.0)) throw DomainError("predicted exponent needs Delta_P > 0");
  const double log_inv = std::log(1.0 / pi_estar);
  p.value = 0.5 - advantage / (2.0 * log_inv * delta_p);
  p.below_zero = p.value < 0.0;
  p.clamped = std::max(0.0, p.value);
  return p;
}

LsBound transposition_ls_bound(int n, int k, double tau0) {
  if (k < 1 || k > n - 1) throw DomainError("transposition bound needs 1 <= k <= n-1");
  if (!(tau0 > 0.0)) throw DomainError("tau0 must be positive");
  const double m = std::min(k, n - k);
  LsBound b;
  b.tau0 = tau0;
  b.omega_lower = n / (static_cast<double>(k) * (n - k) * tau0 * std::log2(n / m));
  return b;
}

double dirichlet_form(const Chain& chain, const std::vector<double>& pi, const std::vector<double>& f) {
  check_sizes(chain, f);
  const auto& space = chain.space();
  long double s = 0.0L;
  for_each_move(chain, [&](std::size_t r, std::uint64_t, const std::vector<Transition>& moves) {
    for (const auto& t : moves) {
      const double d = f[r] - f[space.rank(t.to)];
      s += pi[r] * t.prob * d * d;
    }
  });
  return static_cast<double>(0.5L * s);
}

double entropy_f2(const std::vector<double>& pi, const std::vector<double>& f) {
  long double norm = 0.0L;
  for (std::size_t i = 0; i < f.size(); ++i) norm += pi[i] * static_cast<long double>(f[i]) * f[i];
  if (norm <= 0) return 0.0;
  // Ent = norm * E[phi(f^2/norm)] with phi(u) = u ln u - u + 1 >= 0, so nearly
  // constant f does not lose everything to cancellation.
  long double s = 0.0L;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const long double d = static_cast<long double>(f[i]) * f[i] / norm - 1.0L;
    long double phi;
    if (std::abs(d) < 1e-2L) {
      phi = 0.0L;
      long double p = d;
      for (int k = 2; k <= 12; ++k) {
        p *= d;
        phi += (k % 2 == 0 ? p : -p) / (k * (k - 1.0L));
      }
    } else {
      phi = d <= -1.0L ? 1.0L : (1.0L + d) * std::log1p(d) - d;
    }
    s += pi[i] * phi;
  }
  return static_cast<double>(norm * s);
}

LsEstimate ls_constant_estimate(const Chain& chain, const StationaryDist& pi, const LsOptions& opts) {
  const std::size_t m = chain.space().size();
  if (m > 4096) throw CapacityError("log-Sobolev estimate is limited to 4096 states");
  if (m < 2) throw ValidationError("log-Sobolev estimate needs at least two states");
  const SparseMatrix d = discriminant(chain, pi);
  std::vector<double> values, vectors;
  dense_eigh(d.to_dense(), m, values, &vectors);
  LsEstimate est;
  est.delta_exact = values[m - 1] - values[m - 2];  // gap of -D

  // Transition structure as CSR rows for the gradient.
  const SparseMatrix p = transition_matrix(chain);
  const auto& w = pi.pi;
  auto ratio = [&](const std::vector<double>& f) {
    const double ent = entropy_f2(w, f);
    if (!(ent > 1e-300)) return std::numeric_limits<double>::infinity();
    return dirichlet_form(chain, w, f) / ent;
  };
  auto gradient = [&](const std::vector<double>& f, double r, std::vector<double>& g) {
    const std::vector<double> pf = p.matvec(f);
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) norm += w[i] * f[i] * f[i];
    const double ent = entropy_f2(w, f);
    for (std::size_t i = 0; i < m; ++i) {
      const double de = 2.0 * w[i] * (f[i] - pf[i]);
      const double f2 = f[i] * f[i];
      const double dent = f2 > 0.0 ? 2.0 * w[i] * f[i] * std::log(f2 / norm) : 0.0;
      g[i] = (de - r * dent) / ent / w[i];  // natural gradient in the pi-metric
    }
  };

  std::vector<std::vector<double>> starts;
  std::vector<double> phi(m);
  for (std::size_t i = 0; i < m; ++i) phi[i] = vectors[i * m + (m - 2)] / std::sqrt(w[i]);
  double phi_max = 0.0;
  for (double v : phi) phi_max = std::max(phi_max, std::abs(v));
  for (double eps : {1e-3, 0.3, 0.9}) {
    std::vector<double> f(m);
    for (std::size_t i = 0; i < m; ++i) f[i] = 1.0 + eps * phi[i] / phi_max;
    starts.push_back(std::move(f));
  }
  Rng rng(opts.seed);
  for (int s = 0; s < opts.random_starts; ++s) {
    std::vector<double> f(m);
    for (auto& v : f) v = std::exp(0.5 * rng.normal());
    starts.push_back(std::move(f));
  }

  est.omega_estimate = std::numeric_limits<double>::infinity();
  bool any_stagnant = false;
  std::vector<double> g(m), trial(m);
  for (auto f : starts) {
    double r = ratio(f);
    double step = 1e-2;
    bool converged = false;
    for (int it = 0; it < opts.max_steps && std::isfinite(r); ++it) {
      gradient(f, r, g);
      double gnorm = 0.0;
      for (std::size_t i = 0; i < m; ++i) gnorm += w[i] * g[i] * g[i];
      gnorm = std::sqrt(gnorm);
      if (gnorm < 1e-10 * std::max(r, 1e-12)) {
        converged = true;
        break;
      }
      bool improved = false;
      for (int ls = 0; ls < 40; ++ls) {
        for (std::size_t i = 0; i < m; ++i) trial[i] = f[i] - step * g[i];
        const double rt = ratio(trial);
        if (rt < r) {
          const double gain = r - rt;
          f.swap(trial);
          r = rt;
          step *= 1.5;
          improved = true;
          if (gain < 1e-15 * r) converged = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved || converged) {
        converged = converged || !improved;
        break;
      }
      // Keep the scale fixed; the ratio is homogeneous of degree 0.
      double norm = 0.0;
      for (std::size_t i = 0; i < m; ++i) norm += w[i] * f[i] * f[i];
      norm = std::sqrt(norm);
      for (auto& v : f) v /= norm;
    }
    if (!converged) any_stagnant = true;
    est.omega_estimate = std::min(est.omega_estimate, r);
    ++est.starts;
  }
  est.stagnated = any_stagnant;
  return est;
}

double gibbs_overlap(const std::vector<double>& log_a, const std::vector<double>& log_b) {
  if (log_a.size() != log_b.size()) throw ValidationError("overlap needs equal-length weight vectors");
  auto lse = [](const std::vector<double>& v) {
    const double mx = *std::max_element(v.begin(), v.end());
    long double s = 0.0L;
    for (double x : v) s += std::exp(static_cast<long double>(x - mx));
    return mx + static_cast<double>(std::log(s));
  };
  const double za = lse(log_a), zb = lse(log_b);
  long double s = 0.0L;
  for (std::size_t i = 0; i < log_a.size(); ++i)
    s += std::exp(0.5L * (static_cast<long double>(log_a[i]) - za) + 0.5L * (static_cast<long double>(log_b[i]) - zb));
  return static_cast<double>(s);
}

std::vector<AnnealStep> anneal_hardcore(const StateSpace& space, const std::vector<double>& lambdas) {
  if (space.kind() != SpaceKind::kIndependentSets) throw PairingError("hardcore annealing needs an independent-set space");
  if (lambdas.empty() || !(lambdas.front() > 0.0)) throw ValidationError("hardcore schedule must start at lambda > 0");
  std::vector<double> occ(space.size());
  for (std::size_t i = 0; i < occ.size(); ++i) occ[i] = __builtin_popcountll(space.unrank_bits(i));
  auto logw = [&](double lam) {
    std::vector<double> v(occ.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = occ[i] * std::log(lam);
    return v;
  };
  std::vector<AnnealStep> out;
  std::vector<double> prev = logw(lambdas.front());
  const int n = space.n();
  for (std::size_t k = 1; k < lambdas.size(); ++k) {
    AnnealStep s;
    s.from = lambdas[k - 1];
    s.to = lambdas[k];
    const double delta = s.to / s.from - 1.0;
    s.step_ok = delta >= 0.0 && delta <= 2.0 / n * (1.0 + 1e-12);  // ratio of a multiplied grid rounds
    s.bound = 1.0 - n * delta / 2.0;
    std::vector<double> cur = logw(s.to);
    s.overlap = gibbs_overlap(prev, cur);
    out.push_back(s);
    prev = std::move(cur);
  }
  return out;
}

std::vector<AnnealStep> anneal_ising(const std::vector<double>& energies, const std::vector<double>& betas) {
  if (betas.empty() || betas.front() != 0.0) throw ValidationError("ising schedule must start at beta = 0");
  double hnorm = 0.0;
  for (double e : energies) hnorm = std::max(hnorm, std::abs(e));
  auto logw = [&](double beta) {
    std::vector<double> v(energies.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = -beta * energies[i];
    return v;
  };
  std::vector<AnnealStep> out;
  std::vector<double> prev = logw(betas.front());
  for (std::size_t k = 1; k < betas.size(); ++k) {
    AnnealStep s;
    s.from = betas[k - 1];
    s.to = betas[k];
    const double step = s.to - s.from;
    s.step_ok = step >= 0.0 && (hnorm == 0.0 || step <= 1.0 / hnorm + 1e-15);
    s.bound = std::exp(-step * hnorm / 2.0);
    std::vector<double> cur = logw(s.to);
    s.overlap = gibbs_overlap(prev, cur);
    out.push_back(s);
    prev = std::move(cur);
  }
  return out;
}

ConditionReport condition_report(const Problem& p, double eta, double b, double gap_d, double omega) {
  ConditionReport r;
  const auto& s = p.summary;
  r.b = b;
  r.eta = eta;
  const Stability st = delta_p_stability(*p.chain, s.energies, s.e_star, eta);
  r.delta_p_eta = st.delta_p_eta;
  r.delta_tilde = st.delta_tilde;
  r.alpha_p = alpha_p(st.delta_p_eta, s.e_star, eta);
  r.pseudo_lip = pseudo_lipschitz(*p.chain, s.energies);
  const SpectralDensity sd = spectral_density(s.energies, p.pi.pi, eta, s);
  r.tail_mass = sd.tail_mass;
  r.gamma_emp = sd.gamma_emp;
  r.delta_gap = gap_d;
  if (omega > 0.0) {
    r.omega_used = omega;
    r.omega_source = "supplied";
  } else {
    r.omega_used = gap_d;
    r.omega_source = "delta";
  }
  try {
    r.gamma_herbst = tail_bound_gamma(TailMethod::kHerbst, r.omega_used, s, eta, r.pseudo_lip);
  } catch (const DomainError&) {
    r.gamma_herbst = kNaN;
  }
  try {
    r.gamma_poincare = tail_bound_gamma(TailMethod::kPoincare, gap_d, s, eta, r.pseudo_lip);
  } catch (const DomainError&) {
    r.gamma_poincare = kNaN;
  }
  r.b_star_ls = b_star_log_sobolev(r.gamma_emp, r.omega_used, s.pi_estar);
  r.b_star_poinc = b_star_poincare(gap_d);
  try {
    r.predicted_exponent = predicted_exponent(b, eta, s.e_star, s.pi_estar, st.delta_p_eta).value;
  } catch (const DomainError&) {
    r.predicted_exponent = kNaN;
  }
  return r;
}

std::string to_json(const ConditionReport& r) {
  nlohmann::ordered_json j;
  j["b"] = r.b;
  j["eta"] = r.eta;
  j["delta_p_eta"] = r.delta_p_eta;
  j["delta_tilde"] = r.delta_tilde;
  j["alpha_p"] = r.alpha_p;
  j["pseudo_lip"] = r.pseudo_lip;
  j["tail_mass"] = r.tail_mass;
  j["gamma_emp"] = r.gamma_emp;
  j["gamma_herbst"] = r.gamma_herbst;
  j["gamma_poincare"] = r.gamma_poincare;
  j["b_star_ls"] = r.b_star_ls;
  j["b_star_poinc"] = r.b_star_poinc;
  j["omega_used"] = r.omega_used;
  j["omega_source"] = r.omega_source;
  j["delta_gap"] = r.delta_gap;
  j["predicted_exponent"] = r.predicted_exponent;
  return j.dump();
}

}  // namespace splab
