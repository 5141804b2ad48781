#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "splab/chains.hpp"
#include "splab/cost.hpp"
#include "splab/shortpath.hpp"

namespace splab {

/// max_x E_{y~x}[(H(x) - H(y))^2] over all states; `energies` in space order.
double pseudo_lipschitz(const Chain& chain, const std::vector<double>& energies);

/// E_{y~x}[H(y)] for every x (self-loop included).
std::vector<double> one_step_mean(const Chain& chain, const std::vector<double>& energies);

struct Stability {
  double delta_p_eta = 0.0;  // Delta_P(eta)
  double delta_tilde = 0.0;  // max_x (E_y H(y) - H(x))
};

Stability delta_p_stability(const Chain& chain, const std::vector<double>& energies, double e_star, double eta);

/// alpha_P = Delta_P(eta) / (|E*| (1 - eta)).
double alpha_p(double delta_p_eta, double e_star, double eta);

/// Largest violation of E_y f(c H(y)/E*) >= f(c (1 - alpha) H(x)/E*) over all x,
/// with f(x) = max(0, (x - 1 + eta)/eta). Nonpositive means the inequality holds.
double subdepolarizing_violation(const Chain& chain, const std::vector<double>& energies, double e_star, double eta,
                                 double alpha, double c);

struct SpectralDensity {
  double tail_mass = 0.0;
  double gamma_emp = 0.0;
};

/// tail = pi(H <= (1-eta) E*), gamma = ln(tail) / ln(pi(E*)).
SpectralDensity spectral_density(const std::vector<double>& energies, const std::vector<double>& pi, double eta,
                                 const EnergySummary& summary);

enum class TailMethod { kHerbst, kPoincare };

/// Herbst: omega dev^2 / (|H|_P ln(1/pi*)); Poincare: sqrt(delta) dev / (sqrt(|H|_P) ln(1/pi*)),
/// where dev = E_pi[H] - (1 - eta) E* must be positive.
double tail_bound_gamma(TailMethod method, double constant, const EnergySummary& summary, double eta,
                        double pseudo_lip);

/// Poincare concentration: pi(H <= E_pi H - t) <= exp(-sqrt(delta) t / sqrt(|H|_P)).
double poincare_tail_bound(double delta, double pseudo_lip, double t);

double b_star_log_sobolev(double gamma, double omega, double pi_estar);
double b_star_poincare(double delta);

struct ExponentPrediction {
  double value = 0.5;      // raw formula
  double clamped = 0.5;    // max(0, value)
  bool below_zero = false;
};

ExponentPrediction predicted_exponent(double b, double eta, double e_star, double pi_estar, double delta_p);

struct LsBound {
  double omega_lower = 0.0;
  double tau0 = 1.0;
};

/// omega >= n / (k (n-k) tau0 log2(n / min(k, n-k))).
LsBound transposition_ls_bound(int n, int k, double tau0 = 1.0);

struct LsEstimate {
  double delta_exact = 0.0;
  double omega_estimate = 0.0;
  bool stagnated = false;
  int starts = 0;
};

struct LsOptions {
  int random_starts = 6;
  int max_steps = 3000;
  std::uint64_t seed = 7;
};

/// Exact spectral gap of -D and a multi-start minimization of E(f,f)/Ent(f^2).
LsEstimate ls_constant_estimate(const Chain& chain, const StationaryDist& pi, const LsOptions& opts = {});

/// Dirichlet form and entropy used by the estimator (exposed for tests).
double dirichlet_form(const Chain& chain, const std::vector<double>& pi, const std::vector<double>& f);
double entropy_f2(const std::vector<double>& pi, const std::vector<double>& f);

struct AnnealStep {
  double from = 0.0;
  double to = 0.0;
  double overlap = 0.0;
  double bound = 0.0;
  bool step_ok = true;  // step-size precondition of the bound
};

/// Hardcore family over a fixed independent-set space; grid of increasing lambda.
std::vector<AnnealStep> anneal_hardcore(const StateSpace& space, const std::vector<double>& lambdas);
/// Ising family over the hypercube; energies in space order, grid of increasing beta from 0.
std::vector<AnnealStep> anneal_ising(const std::vector<double>& energies, const std::vector<double>& betas);

/// Overlap sum_x sqrt(pi_a(x) pi_b(x)) from log weights.
double gibbs_overlap(const std::vector<double>& log_a, const std::vector<double>& log_b);

struct ConditionReport {
  double delta_p_eta = 0.0;
  double delta_tilde = 0.0;
  double alpha_p = 0.0;
  double pseudo_lip = 0.0;
  double gamma_emp = 0.0;
  double gamma_herbst = 0.0;
  double gamma_poincare = 0.0;
  double b_star_ls = 0.0;
  double b_star_poinc = 0.0;
  double omega_used = 0.0;
  std::string omega_source;  // "estimate", "delta", or "supplied"
  double delta_gap = 0.0;
  double predicted_exponent = 0.5;
  double tail_mass = 0.0;
  double b = 0.0;
  double eta = 0.5;
};

/// Full report for one (problem, eta, b). `gap_d` is lambda1 - lambda0 of -D;
/// omega <= 0 substitutes gap_d.
ConditionReport condition_report(const Problem& p, double eta, double b, double gap_d, double omega = -1.0);

std::string to_json(const ConditionReport& r);

}  // namespace splab
