#include "splab/instances.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "splab/error.hpp"
#include "splab/rng.hpp"

namespace splab {

double Graph::total_weight() const noexcept {
  if (!weighted()) return static_cast<double>(edges.size());
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

std::vector<std::uint64_t> Graph::neighbor_masks() const {
  std::vector<std::uint64_t> masks(static_cast<std::size_t>(n), 0);
  for (const auto& e : edges) {
    masks[e.i] |= std::uint64_t{1} << e.j;
    masks[e.j] |= std::uint64_t{1} << e.i;
  }
  return masks;
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(n), 0);
  for (const auto& e : edges) {
    ++deg[e.i];
    ++deg[e.j];
  }
  return deg;
}

void Graph::validate() const {
  if (n < 0 || n > 64) throw ValidationError("graph: vertex count must be in [0, 64]");
  if (!weights.empty() && weights.size() != edges.size())
    throw ValidationError("graph: weights length does not match edge count");
  std::set<Edge> seen;
  for (const auto& e : edges) {
    if (e.i == e.j) throw ValidationError("graph: self-loop at vertex " + std::to_string(e.i));
    if (e.i < 0 || e.j >= n || e.i > e.j)
      throw ValidationError("graph: edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                            ") violates 0 <= i < j < n");
    if (!seen.insert(e).second)
      throw ValidationError("graph: duplicate edge (" + std::to_string(e.i) + "," +
                            std::to_string(e.j) + ")");
  }
}

std::string_view to_string(GraphModel m) {
  switch (m) {
    case GraphModel::kErdosRenyi: return "erdos-renyi";
    case GraphModel::kRandomRegular: return "random-regular";
    case GraphModel::kComplete: return "complete";
    case GraphModel::kExplicit: return "explicit";
  }
  return "?";
}

std::string_view to_string(CostKind k) {
  switch (k) {
    case CostKind::kMaxCutHamming: return "maxcut-hamming";
    case CostKind::kMaxBisection: return "maxbisection";
    case CostKind::kMis: return "mis";
    case CostKind::kMisPenalized: return "mis-penalized";
    case CostKind::kCspPenalized: return "csp-penalized";
    case CostKind::kIsing: return "ising";
    case CostKind::kSk: return "sk";
  }
  return "?";
}

GraphModel parse_graph_model(std::string_view s) {
  for (auto m : {GraphModel::kErdosRenyi, GraphModel::kRandomRegular, GraphModel::kComplete,
                 GraphModel::kExplicit})
    if (to_string(m) == s) return m;
  throw ValidationError("unknown graph model '" + std::string(s) + "'");
}

CostKind parse_cost_kind(std::string_view s) {
  for (auto k : {CostKind::kMaxCutHamming, CostKind::kMaxBisection, CostKind::kMis,
                 CostKind::kMisPenalized, CostKind::kCspPenalized, CostKind::kIsing, CostKind::kSk})
    if (to_string(k) == s) return k;
  throw ValidationError("unknown cost kind '" + std::string(s) + "'");
}

double log_density_edge_probability(int n, double factor) {
  if (n < 2) throw ValidationError("edge probability needs n >= 2");
  return std::min(1.0, factor * std::log(static_cast<double>(n)) / n);
}

double average_degree_edge_probability(int n, double avg_degree) {
  if (n < 2) throw ValidationError("edge probability needs n >= 2");
  return std::min(1.0, avg_degree / (n - 1));
}

int InstanceSpec::resolved_k() const {
  if (k >= 0) return k;
  switch (cost) {
    case CostKind::kMaxCutHamming: {
      int r = static_cast<int>(std::sqrt(static_cast<double>(n)));
      while ((r + 1) * (r + 1) <= n) ++r;
      while (r * r > n) --r;
      return r;
    }
    case CostKind::kMaxBisection: return n / 2;
    default: return -1;
  }
}

double InstanceSpec::resolved_rho() const { return rho > 0.0 ? rho : static_cast<double>(n); }

void InstanceSpec::validate() const {
  if (n < 1 || n > 64) throw ValidationError("instance: n must be in [1, 64]");
  switch (model) {
    case GraphModel::kErdosRenyi:
      if (!(p_edge >= 0.0 && p_edge <= 1.0)) throw ValidationError("instance: p_edge must lie in [0, 1]");
      break;
    case GraphModel::kRandomRegular:
      if (degree < 0 || degree >= n) throw ValidationError("instance: regular degree must be in [0, n)");
      if ((n * degree) % 2 != 0) throw ValidationError("instance: n*d must be even for random-regular");
      break;
    case GraphModel::kComplete: break;
    case GraphModel::kExplicit:
      if (!explicit_graph) throw ValidationError("instance: explicit model without a graph");
      if (explicit_graph->n != n) throw ValidationError("instance: explicit graph has wrong vertex count");
      explicit_graph->validate();
      break;
  }
  const int kk = resolved_k();
  if (cost == CostKind::kMaxBisection && (n % 2 != 0 || kk != n / 2))
    throw ValidationError("instance: maxbisection needs even n and k = n/2");
  if (cost == CostKind::kMaxCutHamming && (kk < 0 || kk > n))
    throw ValidationError("instance: Hamming weight out of range");
  if (cost == CostKind::kMisPenalized && rho < 0.0)
    throw ValidationError("instance: penalty must be positive");
  if (!(lambda > 0.0)) throw ValidationError("instance: fugacity must be positive");
  if (beta < 0.0) throw ValidationError("instance: inverse temperature must be nonnegative");
}

Graph erdos_renyi(int n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("erdos-renyi: p must lie in [0, 1]");
  Rng rng(seed);
  Graph g;
  g.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < p) g.edges.push_back({i, j});
  return g;
}

Graph random_regular(int n, int d, std::uint64_t seed, int retry_budget) {
  if (d < 0 || (n > 0 && d >= n) || (n * d) % 2 != 0)
    throw ValidationError("random-regular: need 0 <= d < n and n*d even");
  Rng rng(seed);
  const int points = n * d;
  std::vector<int> stubs(static_cast<std::size_t>(points));
  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    for (int p = 0; p < points; ++p) stubs[p] = p / d;
    for (int i = points - 1; i > 0; --i) {
      const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(stubs[i], stubs[j]);
    }
    std::set<Edge> edges;
    bool ok = true;
    for (int t = 0; t + 1 < points && ok; t += 2) {
      int a = stubs[t], b = stubs[t + 1];
      if (a == b) {
        ok = false;
        break;
      }
      if (a > b) std::swap(a, b);
      ok = edges.insert({a, b}).second;
    }
    if (ok) {
      Graph g;
      g.n = n;
      g.edges.assign(edges.begin(), edges.end());
      return g;
    }
  }
  throw GenerationError("random-regular: pairing model exceeded retry budget of " +
                        std::to_string(retry_budget));
}

Graph complete_graph(int n) {
  Graph g;
  g.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.edges.push_back({i, j});
  return g;
}

Graph gen_graph(const InstanceSpec& spec) {
  spec.validate();
  Graph g;
  switch (spec.model) {
    case GraphModel::kErdosRenyi: g = erdos_renyi(spec.n, spec.p_edge, spec.seed); break;
    case GraphModel::kRandomRegular: g = random_regular(spec.n, spec.degree, spec.seed); break;
    case GraphModel::kComplete: g = complete_graph(spec.n); break;
    case GraphModel::kExplicit: g = *spec.explicit_graph; break;
  }
  if (spec.cost == CostKind::kSk && !g.weighted()) {
    // Couplings come from a separate stream so the edge set does not shift them.
    Rng rng(spec.seed, 0x5eed5c);
    g.weights.resize(g.edges.size());
    for (auto& w : g.weights) w = rng.normal();
  }
  return g;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_graph(std::ostream& out, const Graph& g) {
  g.validate();
  out << g.n << ' ' << g.edges.size() << ' ' << (g.weighted() ? 1 : 0) << '\n';
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    out << g.edges[e].i << ' ' << g.edges[e].j;
    if (g.weighted()) out << ' ' << format_double(g.weights[e]);
    out << '\n';
  }
}

namespace {

template <typename T>
bool parse_token(std::string_view tok, T& value) {
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  return res.ec == std::errc{} && res.ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

Graph read_graph(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_nonempty = [&](std::vector<std::string_view>& toks) {
    while (std::getline(in, line)) {
      ++lineno;
      toks = split_ws(line);
      if (!toks.empty()) return true;
    }
    return false;
  };
  std::vector<std::string_view> toks;
  if (!next_nonempty(toks)) throw ParseError("empty graph file", lineno + 1);
  int n = 0, weighted = 0;
  long long m = 0;
  if (toks.size() != 3 || !parse_token(toks[0], n) || !parse_token(toks[1], m) ||
      !parse_token(toks[2], weighted) || n < 0 || n > 64 || m < 0 || (weighted != 0 && weighted != 1))
    throw ParseError("header must be `n m weighted` with weighted in {0,1}", lineno);
  Graph g;
  g.n = n;
  std::set<Edge> seen;
  for (long long e = 0; e < m; ++e) {
    if (!next_nonempty(toks)) throw ParseError("expected " + std::to_string(m) + " edges, file ended", lineno + 1);
    const std::size_t want = weighted ? 3 : 2;
    Edge edge;
    if (toks.size() != want || !parse_token(toks[0], edge.i) || !parse_token(toks[1], edge.j))
      throw ParseError("malformed edge line", lineno);
    if (edge.i < 0 || edge.j >= n || edge.i >= edge.j)
      throw ParseError("edge indices must satisfy 0 <= i < j < n", lineno);
    if (!seen.insert(edge).second) throw ParseError("duplicate edge", lineno);
    g.edges.push_back(edge);
    if (weighted) {
      double w = 0.0;
      if (!parse_token(toks[2], w)) throw ParseError("malformed weight", lineno);
      g.weights.push_back(w);
    }
  }
  if (next_nonempty(toks)) throw ParseError("trailing content after edge list", lineno);
  return g;
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  write_graph(out, g);
  if (!out) throw ValidationError("write to '" + path.string() + "' failed");
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return read_graph(in);
}

}  // namespace splab
