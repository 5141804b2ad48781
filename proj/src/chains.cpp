#include "splab/chains.hpp"

#include <algorithm>
#include <cmath>

#include "splab/error.hpp"

namespace splab {

namespace {

// 1 / (1 + e^t) without overflow.
double logistic_complement(double t) {
  if (t > 0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  long double s = 0.0L;
  for (double x : v) s += std::exp(static_cast<long double>(x - m));
  return m + static_cast<double>(std::log(s));
}

}  // namespace

std::string_view to_string(ChainKind k) {
  switch (k) {
    case ChainKind::kHypercubeWalk: return "hypercube-walk";
    case ChainKind::kTranspositionWalk: return "transposition-walk";
    case ChainKind::kGlauberHardcore: return "glauber-hardcore";
    case ChainKind::kGlauberIsing: return "glauber-ising";
    case ChainKind::kGlauberSk: return "glauber-sk";
  }
  return "?";
}

ChainKind parse_chain_kind(std::string_view s) {
  for (auto k : {ChainKind::kHypercubeWalk, ChainKind::kTranspositionWalk, ChainKind::kGlauberHardcore,
                 ChainKind::kGlauberIsing, ChainKind::kGlauberSk})
    if (to_string(k) == s) return k;
  throw ValidationError("unknown chain kind '" + std::string(s) + "'");
}

SpaceKind required_space(ChainKind k) noexcept {
  switch (k) {
    case ChainKind::kTranspositionWalk: return SpaceKind::kHammingSlice;
    case ChainKind::kGlauberHardcore: return SpaceKind::kIndependentSets;
    default: return SpaceKind::kHypercube;
  }
}

std::vector<double> StationaryDist::weights() const {
  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i]);
  return w;
}

std::vector<double> StationaryDist::sqrt_pi() const {
  std::vector<double> s(pi.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::exp(0.5 * (log_weights[i] - log_z));
  return s;
}

double StationaryDist::min_prob() const { return *std::min_element(pi.begin(), pi.end()); }

Chain::Chain(ChainKind kind, StateSpacePtr space, const Graph& g, ChainParams params)
    : kind_(kind), space_(std::move(space)), params_(params) {
  if (!space_) throw ValidationError("chain needs a state space");
  if (space_->kind() != required_space(kind_))
    throw PairingError(std::string(to_string(kind_)) + " cannot run on a " + std::string(to_string(space_->kind())) +
                       " space");
  if (!(params_.zeta >= 0.0 && params_.zeta <= 1.0)) throw ValidationError("laziness must lie in [0, 1]");
  if (kind_ == ChainKind::kGlauberHardcore && !(params_.lambda > 0.0))
    throw ValidationError("fugacity must be positive");
  if ((kind_ == ChainKind::kGlauberIsing || kind_ == ChainKind::kGlauberSk) && !(params_.beta >= 0.0))
    throw ValidationError("inverse temperature must be nonnegative");
  if (kind_ == ChainKind::kGlauberHardcore || kind_ == ChainKind::kGlauberIsing || kind_ == ChainKind::kGlauberSk) {
    if (g.n != space_->n()) throw ValidationError("chain graph and state space disagree on n");
    g.validate();
    masks_ = g.neighbor_masks();
    adj_.resize(static_cast<std::size_t>(g.n));
    const double scale = kind_ == ChainKind::kGlauberSk ? 1.0 / std::sqrt(static_cast<double>(g.n)) : 1.0;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const double j = scale * g.weight(e);
      adj_[g.edges[e].i].emplace_back(g.edges[e].j, j);
      adj_[g.edges[e].j].emplace_back(g.edges[e].i, j);
      couplings_.emplace_back(g.edges[e], j);
    }
  }
}

Chain make_chain(ChainKind kind, StateSpacePtr space, const Graph& g, ChainParams params) {
  return Chain(kind, std::move(space), g, params);
}

bool Chain::symmetric_kernel() const noexcept {
  return kind_ == ChainKind::kHypercubeWalk || kind_ == ChainKind::kTranspositionWalk;
}

double Chain::gibbs_energy(std::uint64_t x) const {
  if (kind_ != ChainKind::kGlauberIsing && kind_ != ChainKind::kGlauberSk) return 0.0;
  double s = 0.0;
  for (const auto& [e, j] : couplings_) s += (((x >> e.i) ^ (x >> e.j)) & 1U) ? -j : j;
  if (kind_ == ChainKind::kGlauberIsing && params_.field != 0.0)
    s += params_.field * static_cast<double>(2 * __builtin_popcountll(x) - n());
  return s;
}

double Chain::flip_delta(std::uint64_t x, int i) const {
  double local = kind_ == ChainKind::kGlauberIsing ? params_.field : 0.0;
  for (const auto& [j, c] : adj_[i]) local += ((x >> j) & 1U) ? c : -c;
  const double si = ((x >> i) & 1U) ? 1.0 : -1.0;
  return -2.0 * si * local;
}

double Chain::move_prob(std::uint64_t x, int i) const {
  const double inv_n = 1.0 / n();
  switch (kind_) {
    case ChainKind::kHypercubeWalk: return inv_n;
    case ChainKind::kGlauberHardcore: {
      const double lam = params_.lambda;
      if ((x >> i) & 1U) return inv_n / (1.0 + lam);
      if (masks_[i] & x) return 0.0;
      return inv_n * lam / (1.0 + lam);
    }
    case ChainKind::kGlauberIsing:
    case ChainKind::kGlauberSk: return inv_n * logistic_complement(params_.beta * flip_delta(x, i));
    default: return 0.0;
  }
}

void Chain::transitions(std::uint64_t x, std::vector<Transition>& out) const {
  out.clear();
  const double lazy = 1.0 - params_.zeta;
  const int sites = n();
  if (kind_ == ChainKind::kTranspositionWalk) {
    const int k = __builtin_popcountll(x);
    if (k == 0 || k == sites) return;
    const double p = lazy / (static_cast<double>(k) * (sites - k));
    const std::uint64_t full = sites == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << sites) - 1;
    for (std::uint64_t up = x; up; up &= up - 1) {
      const std::uint64_t a = up & -up;
      for (std::uint64_t down = ~x & full; down; down &= down - 1) {
        const std::uint64_t b = down & -down;
        out.push_back({x ^ a ^ b, p});
      }
    }
    return;
  }
  for (int i = 0; i < sites; ++i) {
    const double p = move_prob(x, i);
    if (p > 0.0) out.push_back({x ^ (std::uint64_t{1} << i), lazy * p});
  }
}

double Chain::self_loop(std::uint64_t x) const {
  std::vector<Transition> out;
  transitions(x, out);
  double s = 0.0;
  for (const auto& t : out) s += t.prob;
  return 1.0 - s;
}

double Chain::transition_prob(std::uint64_t x, std::uint64_t y) const {
  if (x == y) return self_loop(x);
  const std::uint64_t diff = x ^ y;
  const double lazy = 1.0 - params_.zeta;
  if (kind_ == ChainKind::kTranspositionWalk) {
    if (__builtin_popcountll(diff) != 2 || __builtin_popcountll(diff & x) != 1) return 0.0;
    const int k = __builtin_popcountll(x);
    return lazy / (static_cast<double>(k) * (n() - k));
  }
  if (__builtin_popcountll(diff) != 1) return 0.0;
  return lazy * move_prob(x, __builtin_ctzll(diff));
}

double Chain::log_weight(std::uint64_t x) const {
  switch (kind_) {
    case ChainKind::kGlauberHardcore: return __builtin_popcountll(x) * std::log(params_.lambda);
    case ChainKind::kGlauberIsing:
    case ChainKind::kGlauberSk: return -params_.beta * gibbs_energy(x);
    default: return 0.0;
  }
}

std::uint64_t Chain::step(std::uint64_t x, Rng& rng) const {
  if (params_.zeta > 0.0 && rng.uniform() < params_.zeta) return x;
  const int sites = n();
  switch (kind_) {
    case ChainKind::kHypercubeWalk: return x ^ (std::uint64_t{1} << rng.below(static_cast<std::uint64_t>(sites)));
    case ChainKind::kTranspositionWalk: {
      const int k = __builtin_popcountll(x);
      if (k == 0 || k == sites) return x;
      auto nth_set = [](std::uint64_t w, std::uint64_t r) {
        for (; r > 0; --r) w &= w - 1;
        return w & -w;
      };
      const std::uint64_t full = sites == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << sites) - 1;
      const std::uint64_t a = nth_set(x, rng.below(static_cast<std::uint64_t>(k)));
      const std::uint64_t b = nth_set(~x & full, rng.below(static_cast<std::uint64_t>(sites - k)));
      return x ^ a ^ b;
    }
    default: {
      const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(sites)));
      const double p = move_prob(x, i) * sites;
      return rng.uniform() < p ? x ^ (std::uint64_t{1} << i) : x;
    }
  }
}

StationaryDist stationary(const Chain& chain) {
  const auto& space = chain.space();
  StationaryDist d;
  d.log_weights.resize(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    d.log_weights[i] = chain.log_weight(space.unrank_bits(i));
    if (!std::isfinite(d.log_weights[i])) throw ValidationError("stationary weight is not finite");
  }
  d.log_z = log_sum_exp(d.log_weights);
  d.pi.resize(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) d.pi[i] = std::exp(d.log_weights[i] - d.log_z);
  return d;
}

SparseMatrix transition_matrix(const Chain& chain) {
  const auto& space = chain.space();
  return SparseMatrix::from_rows(
      space.size(),
      [&](std::size_t r, auto& out) {
        std::vector<Transition> moves;
        const std::uint64_t x = space.unrank_bits(r);
        chain.transitions(x, moves);
        double s = 0.0;
        for (const auto& t : moves) {
          out.emplace_back(static_cast<std::int32_t>(space.rank(t.to)), t.prob);
          s += t.prob;
        }
        out.emplace_back(static_cast<std::int32_t>(r), 1.0 - s);
      },
      false);
}

SparseMatrix discriminant(const Chain& chain, const StationaryDist& pi, double tol) {
  const auto& space = chain.space();
  if (pi.pi.size() != space.size()) throw ValidationError("stationary vector does not match the chain");
  const bool sym = chain.symmetric_kernel();
  return SparseMatrix::from_rows(
      space.size(),
      [&](std::size_t r, auto& out) {
        std::vector<Transition> moves;
        const std::uint64_t x = space.unrank_bits(r);
        chain.transitions(x, moves);
        double s = 0.0;
        for (const auto& t : moves) {
          const auto c = space.rank(t.to);
          s += t.prob;
          if (sym) {
            out.emplace_back(static_cast<std::int32_t>(c), t.prob);
            continue;
          }
          const double back = chain.transition_prob(t.to, x);
          const double resid = std::abs(pi.pi[r] * t.prob - pi.pi[c] * back);
          if (resid > tol)
            throw ReversibilityError("detailed balance residual " + format_double(resid) + " between states " +
                                     std::to_string(r) + " and " + std::to_string(c));
          out.emplace_back(static_cast<std::int32_t>(c), std::sqrt(t.prob * back));
        }
        out.emplace_back(static_cast<std::int32_t>(r), 1.0 - s);
      },
      true);
}

BalanceReport check_balance(const Chain& chain, const StationaryDist& pi) {
  const auto& space = chain.space();
  BalanceReport rep;
  std::vector<Transition> moves;
  for (std::size_t r = 0; r < space.size(); ++r) {
    const std::uint64_t x = space.unrank_bits(r);
    chain.transitions(x, moves);
    double s = chain.self_loop(x);
    for (const auto& t : moves) {
      const auto c = space.rank(t.to);
      s += t.prob;
      rep.detailed_balance =
          std::max(rep.detailed_balance, std::abs(pi.pi[r] * t.prob - pi.pi[c] * chain.transition_prob(t.to, x)));
    }
    rep.row_sum = std::max(rep.row_sum, std::abs(s - 1.0));
  }
  return rep;
}

double critical_threshold(ThresholdKind kind, int d) {
  if (d < 3) throw DomainError("critical threshold needs degree d >= 3");
  switch (kind) {
    case ThresholdKind::kHardcore: return std::pow(d - 1.0, d - 1) / std::pow(d - 2.0, d);
    case ThresholdKind::kIsingAntiferro: return (d - 2.0) / d;
  }
  return 0.0;
}

}  // namespace splab
