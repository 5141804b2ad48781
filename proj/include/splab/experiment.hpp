#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "splab/chains.hpp"
#include "splab/instances.hpp"
#include "splab/shortpath.hpp"

namespace splab {

enum class BPolicy { kFixed, kPhaseTransition, kRuntimeOptimal };

std::string_view to_string(BPolicy p);

/// How the edge probability of Erdos-Renyi graphs is chosen per n.
enum class EdgeRule { kConstant, kLogDensity, kAverageDegree };

struct ExperimentConfig {
  std::string name = "experiment";

  // Problem template.
  CostKind cost = CostKind::kMaxCutHamming;
  GraphModel model = GraphModel::kErdosRenyi;
  EdgeRule edge_rule = EdgeRule::kLogDensity;
  double edge_value = 2.0;  // p, the log-density factor, or the average degree
  int degree = 3;           // random-regular
  int k = -1;               // -1: cost default (floor(sqrt n) or n/2)
  double rho = 0.0;         // <= 0: n
  double field = 0.0;
  bool mean_center = false;

  // Chain.
  ChainKind chain = ChainKind::kTranspositionWalk;
  ChainParams chain_params;

  std::vector<int> n_values;
  int instances_per_n = 100;
  double eta = 0.5;

  BPolicy policy = BPolicy::kFixed;
  std::vector<double> b_values{0.0};  // fixed policy: one row per value
  std::vector<double> b_grid;         // runtime-optimal grid
  PhaseOptions phase;

  bool theory_columns = true;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  double max_failure_fraction = 0.1;

  std::filesystem::path csv_path;
  std::filesystem::path failures_path;

  void validate() const;
};

/// Parses the JSON config format documented in docs/config.md.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Per-instance seed derived from (config seed, n, instance id).
std::uint64_t instance_seed(std::uint64_t seed, int n, int instance);

/// Instance spec for (config, n, instance id).
InstanceSpec instance_spec(const ExperimentConfig& cfg, int n, int instance);
CostSpec instance_cost(const ExperimentConfig& cfg, int n, int instance);

struct ResultRow {
  int n = 0;
  int k = -1;
  std::uint64_t seed = 0;
  int instance = 0;
  std::size_t m = 0;
  double b = 0.0;
  double eta = 0.5;
  double e_star = 0.0;
  double pi_estar = 0.0;
  double overlap_init = 0.0;
  double overlap_opt = 0.0;
  double gap_d = 0.0;
  double gap_hb = 0.0;
  double e_b = 0.0;
  double eff_runtime = 0.0;
  std::optional<double> delta_p_eta;
  std::optional<double> pseudo_lip;
  std::optional<double> gamma_emp;
  std::optional<double> phase_b;
};

struct FailureRow {
  int n = 0;
  int instance = 0;
  std::string reason;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<FailureRow> failures;
  std::size_t attempted = 0;
};

/// Runs every (n, instance) job; rows come back ordered by (n, instance, b)
/// regardless of worker count. Throws when too many instances fail.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Rows for a single instance (the work unit of run_experiment).
std::vector<ResultRow> run_instance(const ExperimentConfig& cfg, int n, int instance,
                                    std::shared_ptr<const SparseMatrix> shared_d = nullptr,
                                    std::optional<double> shared_gap_d = std::nullopt);

inline constexpr const char* kCsvHeader =
    "n,k,seed,instance_id,M,b,eta,e_star,pi_estar,overlap_init,overlap_opt,gap_D,gap_Hb,e_b,eff_runtime,"
    "delta_p_eta,pseudo_lip,gamma_emp,phase_b";

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& in);
void save_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> load_csv(const std::filesystem::path& path);

struct FitPoint {
  double log_size = 0.0;
  double log_response = 0.0;
};

struct FitResult {
  double exponent = 0.0;
  double stderr_ = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double intercept = 0.0;
  std::vector<FitPoint> points;
};

enum class FitResponse { kInverseOverlapOpt, kInverseOverlapInit, kEffRuntime };

/// Worst-per-n response against feasible-space size, OLS on log2 scales.
FitResult fit_exponent(const std::vector<ResultRow>& rows, FitResponse response = FitResponse::kInverseOverlapOpt);
/// OLS of log2(y) on log2(x) for already-aggregated points.
FitResult fit_power_law(const std::vector<double>& sizes, const std::vector<double>& responses);

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_pass() const noexcept;
  std::string to_json() const;
};

enum class VerifyLevel { kFast, kFull };

/// Cross-module invariant suite.
VerifyReport verify_suite(VerifyLevel level);

}  // namespace splab
