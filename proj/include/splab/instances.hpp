#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace splab {

struct Edge {
  int i = 0;
  int j = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph on vertices 0..n-1 with optional real edge weights.
struct Graph {
  int n = 0;
  std::vector<Edge> edges;     // each with i < j, no duplicates
  std::vector<double> weights; // empty, or one per edge

  bool weighted() const noexcept { return !weights.empty(); }
  std::size_t num_edges() const noexcept { return edges.size(); }
  double weight(std::size_t e) const noexcept { return weighted() ? weights[e] : 1.0; }
  double total_weight() const noexcept;

  /// Bitmask of neighbours per vertex (n <= 64).
  std::vector<std::uint64_t> neighbor_masks() const;
  std::vector<int> degrees() const;

  /// Throws ValidationError on self-loops, duplicates, bad indices or weight length.
  void validate() const;

  friend bool operator==(const Graph&, const Graph&) = default;
};

enum class GraphModel { kErdosRenyi, kRandomRegular, kComplete, kExplicit };

enum class CostKind { kMaxCutHamming, kMaxBisection, kMis, kMisPenalized, kCspPenalized, kIsing, kSk };

std::string_view to_string(GraphModel m);
std::string_view to_string(CostKind k);
GraphModel parse_graph_model(std::string_view s);
CostKind parse_cost_kind(std::string_view s);

/// Edge probability 2 ln n / n used by the ensemble experiments (`factor` = 2).
double log_density_edge_probability(int n, double factor = 2.0);
/// Edge probability p / (n - 1) giving average degree p.
double average_degree_edge_probability(int n, double avg_degree);

/// Everything needed to regenerate one problem instance.
struct InstanceSpec {
  int n = 0;
  GraphModel model = GraphModel::kErdosRenyi;
  double p_edge = 0.0;
  int degree = 0;
  std::optional<Graph> explicit_graph;

  CostKind cost = CostKind::kMaxCutHamming;
  int k = -1;           // Hamming weight; -1 selects the default for the cost kind
  double rho = 0.0;     // penalty; <= 0 selects n for mis-penalized
  double lambda = 1.0;  // hardcore fugacity
  double beta = 0.0;    // inverse temperature
  double field = 0.0;   // uniform Ising field h
  std::uint64_t seed = 0;

  /// k actually used: floor(sqrt(n)) for maxcut-hamming, n/2 for maxbisection.
  int resolved_k() const;
  double resolved_rho() const;
  void validate() const;
};

inline constexpr int kRegularRetryBudget = 10000;

/// Deterministic for fixed (spec, seed). SK costs get standard-normal weights.
Graph gen_graph(const InstanceSpec& spec);

Graph erdos_renyi(int n, double p, std::uint64_t seed);
Graph random_regular(int n, int d, std::uint64_t seed, int retry_budget = kRegularRetryBudget);
Graph complete_graph(int n);

/// Text format: `n m weighted` then m lines `i j [w]`.
void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in);
void save_graph(const Graph& g, const std::filesystem::path& path);
Graph load_graph(const std::filesystem::path& path);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace splab
