#include "splab/cost.hpp"

#include <algorithm>
#include <cmath>

#include "splab/error.hpp"

namespace splab {

bool CspConstraint::satisfied(std::uint64_t bits) const noexcept {
  unsigned pattern = 0;
  for (std::size_t j = 0; j < vars.size(); ++j) pattern |= static_cast<unsigned>((bits >> vars[j]) & 1U) << j;
  return (satisfying >> pattern) & 1U;
}

bool CostSpec::integral() const noexcept {
  switch (kind) {
    case CostKind::kMaxCutHamming:
    case CostKind::kMaxBisection:
      if (!graph.weighted()) return true;
      return std::all_of(graph.weights.begin(), graph.weights.end(), [](double w) { return w == std::floor(w); });
    case CostKind::kMis: return true;
    case CostKind::kMisPenalized: return rho == std::floor(rho);
    case CostKind::kIsing:
      return field == std::floor(field) &&
             std::all_of(graph.weights.begin(), graph.weights.end(), [](double w) { return w == std::floor(w); });
    case CostKind::kCspPenalized:
    case CostKind::kSk: return false;
  }
  return false;
}

SpaceKind CostSpec::natural_space() const noexcept {
  switch (kind) {
    case CostKind::kMaxCutHamming:
    case CostKind::kMaxBisection: return SpaceKind::kHammingSlice;
    case CostKind::kMis: return SpaceKind::kIndependentSets;
    default: return SpaceKind::kHypercube;
  }
}

void CostSpec::validate() const {
  graph.validate();
  if (kind == CostKind::kMisPenalized && !(rho > 0.0)) throw ValidationError("mis-penalized needs rho > 0");
  if (kind == CostKind::kMaxBisection && (graph.n % 2 != 0 || (k >= 0 && k != graph.n / 2)))
    throw ValidationError("maxbisection needs even n and k = n/2");
  if (kind == CostKind::kCspPenalized) {
    if (!(base_norm > 0.0)) throw ValidationError("csp-penalized needs a positive normalization");
    for (const auto& c : constraints) {
      if (c.vars.empty() || c.vars.size() > 6) throw ValidationError("csp constraint arity must be in [1, 6]");
      for (int v : c.vars)
        if (v < 0 || v >= graph.n) throw ValidationError("csp constraint variable out of range");
      const int s = c.num_satisfying();
      const int total = 1 << c.arity();
      if (c.arity() < 6 && (c.satisfying >> total) != 0)
        throw ValidationError("csp constraint mask has bits beyond 2^arity");
      if (s == 0 || s == total)
        throw DegenerateConstraintError("csp constraint with " + std::to_string(s) + " of " + std::to_string(total) +
                                        " satisfying assignments has an undefined weight");
    }
  }
}

CostSpec make_cost(const InstanceSpec& spec, const Graph& g) {
  CostSpec c;
  c.kind = spec.cost;
  c.graph = g;
  c.k = spec.resolved_k();
  c.rho = spec.cost == CostKind::kMisPenalized ? spec.resolved_rho() : spec.rho;
  c.field = spec.field;
  c.validate();
  return c;
}

CostSpec make_csp_cost(const Graph& g, std::vector<CspConstraint> constraints) {
  CostSpec c;
  c.kind = CostKind::kCspPenalized;
  c.graph = g;
  c.constraints = std::move(constraints);
  c.validate();
  if (g.n > 26) throw CapacityError("csp-penalized normalization enumerates 2^n states; n <= 26 required");
  // Operator norm of the diagonal base objective.
  CostSpec base;
  base.kind = CostKind::kMaxCutHamming;
  base.graph = g;
  EnergyEvaluator eval(base);
  double norm = 0.0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << g.n); ++x) norm = std::max(norm, std::abs(eval.raw(x)));
  c.base_norm = norm > 0.0 ? norm : 1.0;
  return c;
}

EnergyEvaluator::EnergyEvaluator(const CostSpec& cost) : cost_(cost), shift_(cost.shift) {
  cost_.validate();
  masks_ = cost_.graph.neighbor_masks();
  integral_ = cost_.integral();
  unit_weights_ = !cost_.graph.weighted();
  couplings_.resize(cost_.graph.num_edges());
  const double scale = cost_.kind == CostKind::kSk ? 1.0 / std::sqrt(static_cast<double>(cost_.graph.n)) : 1.0;
  for (std::size_t e = 0; e < couplings_.size(); ++e) couplings_[e] = scale * cost_.graph.weight(e);
}

namespace {

// Number of edges with both endpoints set in `bits`.
std::int64_t inner_edges(const std::vector<std::uint64_t>& masks, std::uint64_t bits) {
  std::int64_t twice = 0;
  for (std::uint64_t r = bits; r; r &= r - 1) twice += __builtin_popcountll(masks[__builtin_ctzll(r)] & bits);
  return twice / 2;
}

std::int64_t cut_edges(const std::vector<std::uint64_t>& masks, std::uint64_t bits) {
  std::int64_t cut = 0;
  for (std::uint64_t r = bits; r; r &= r - 1) cut += __builtin_popcountll(masks[__builtin_ctzll(r)] & ~bits);
  return cut;
}

}  // namespace

std::int64_t EnergyEvaluator::integer(std::uint64_t bits) const noexcept {
  const auto& g = cost_.graph;
  switch (cost_.kind) {
    case CostKind::kMaxCutHamming:
    case CostKind::kMaxBisection: {
      if (unit_weights_) return -cut_edges(masks_, bits);
      std::int64_t s = 0;
      for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (((bits >> g.edges[e].i) ^ (bits >> g.edges[e].j)) & 1U) s -= static_cast<std::int64_t>(g.weights[e]);
      return s;
    }
    case CostKind::kMis: return -__builtin_popcountll(bits);
    case CostKind::kMisPenalized:
      return -__builtin_popcountll(bits) + static_cast<std::int64_t>(cost_.rho) * inner_edges(masks_, bits);
    case CostKind::kIsing: {
      std::int64_t s = 0;
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const std::int64_t w = unit_weights_ ? 1 : static_cast<std::int64_t>(g.weights[e]);
        s += (((bits >> g.edges[e].i) ^ (bits >> g.edges[e].j)) & 1U) ? -w : w;
      }
      const std::int64_t mag = 2 * __builtin_popcountll(bits) - g.n;
      return s + static_cast<std::int64_t>(cost_.field) * mag;
    }
    default: return 0;
  }
}

double EnergyEvaluator::raw(std::uint64_t bits) const noexcept {
  if (integral_) return static_cast<double>(integer(bits));
  const auto& g = cost_.graph;
  switch (cost_.kind) {
    case CostKind::kMaxCutHamming:
    case CostKind::kMaxBisection: {
      double s = 0.0;
      for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (((bits >> g.edges[e].i) ^ (bits >> g.edges[e].j)) & 1U) s -= couplings_[e];
      return s;
    }
    case CostKind::kMisPenalized:
      return -static_cast<double>(__builtin_popcountll(bits)) +
             cost_.rho * static_cast<double>(inner_edges(masks_, bits));
    case CostKind::kIsing:
    case CostKind::kSk: {
      double s = 0.0;
      for (std::size_t e = 0; e < g.edges.size(); ++e)
        s += (((bits >> g.edges[e].i) ^ (bits >> g.edges[e].j)) & 1U) ? -couplings_[e] : couplings_[e];
      if (cost_.kind == CostKind::kIsing && cost_.field != 0.0)
        s += cost_.field * static_cast<double>(2 * __builtin_popcountll(bits) - g.n);
      return s;
    }
    case CostKind::kCspPenalized: {
      double s = -static_cast<double>(cut_edges(masks_, bits));
      if (g.weighted()) {
        s = 0.0;
        for (std::size_t e = 0; e < g.edges.size(); ++e)
          if (((bits >> g.edges[e].i) ^ (bits >> g.edges[e].j)) & 1U) s -= g.weights[e];
      }
      s /= cost_.base_norm;
      for (const auto& c : cost_.constraints) {
        const int sat = c.num_satisfying();
        s += c.satisfied(bits) ? -1.0 / sat : 1.0 / ((1 << c.arity()) - sat);
      }
      return s;
    }
    case CostKind::kMis: return -static_cast<double>(__builtin_popcountll(bits));
  }
  return 0.0;
}

double eval_energy(const CostSpec& cost, const SpinConfig& z) {
  if (z.n != cost.graph.n) throw ValidationError("configuration size does not match the cost");
  return EnergyEvaluator(cost)(z.bits);
}

EnergySummary enumerate_energies(const CostSpec& cost, const StateSpace& space, const std::vector<double>& pi) {
  if (space.n() != cost.graph.n) throw ValidationError("cost and state space disagree on n");
  if (pi.size() != space.size()) throw ValidationError("stationary vector length does not match the space");
  EnergyEvaluator eval(cost);
  const std::size_t m = space.size();
  EnergySummary s;
  s.energies.resize(m);
  std::vector<std::int64_t> ints;
  if (eval.integral()) ints.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint64_t bits = space.unrank_bits(i);
    s.energies[i] = eval(bits);
    if (eval.integral()) ints[i] = eval.integer(bits);
  }
  // Ties are decided on the exact integer channel when one exists.
  if (eval.integral()) {
    const std::int64_t best = *std::min_element(ints.begin(), ints.end());
    for (std::size_t i = 0; i < m; ++i)
      if (ints[i] == best) s.minimizers.push_back(i);
  } else {
    const double best = *std::min_element(s.energies.begin(), s.energies.end());
    for (std::size_t i = 0; i < m; ++i)
      if (s.energies[i] == best) s.minimizers.push_back(i);
  }
  s.e_star = s.energies[s.minimizers.front()];
  for (std::size_t i : s.minimizers) s.pi_estar += pi[i];
  long double mean = 0.0L;
  for (std::size_t i = 0; i < m; ++i) mean += static_cast<long double>(pi[i]) * s.energies[i];
  s.mean_pi = static_cast<double>(mean);
  return s;
}

EnergySummary ground_truth(const CostSpec& cost, const StateSpace& space, const std::vector<double>& pi) {
  EnergySummary s = enumerate_energies(cost, space, pi);
  if (!(s.e_star < 0.0))
    throw InvariantBreach("ground energy " + format_double(s.e_star) + " is not negative; shift or rescale the cost");
  return s;
}

double mean_energy_closed_form(const CostSpec& cost, int k) {
  if (cost.kind != CostKind::kMaxCutHamming && cost.kind != CostKind::kMaxBisection)
    throw ValidationError("closed-form mean applies to maxcut costs on a Hamming slice");
  const int n = cost.graph.n;
  if (k < 0 || k > n) throw ValidationError("closed-form mean: k out of range");
  if (n < 2) return -cost.shift;
  const double p = 2.0 * k * (n - k) / (static_cast<double>(n) * (n - 1));
  return -cost.graph.total_weight() * p - cost.shift;
}

CostSpec mean_centered(const CostSpec& cost, const StateSpace& space, const std::vector<double>& pi) {
  CostSpec c = cost;
  c.shift = 0.0;
  const EnergySummary s = enumerate_energies(c, space, pi);
  c.shift = s.mean_pi;
  return c;
}

}  // namespace splab
