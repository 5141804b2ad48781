// splab: command-line driver for single instances, b sweeps, ensembles and fits.
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "splab/error.hpp"
#include "splab/experiment.hpp"
#include "splab/parallel.hpp"
#include "splab/search.hpp"
#include "splab/theory.hpp"

using namespace splab;
using ojson = nlohmann::ordered_json;

namespace {

// Instance flags shared by gen, solve, sweep-b and phase-b.
struct InstanceFlags {
  std::string config;
  std::string graph_file;
  int n = 12;
  std::string cost = "maxcut-hamming";
  std::string model = "erdos-renyi";
  std::string edge_rule = "log-density";
  double edge_value = 2.0;
  int degree = 3;
  int k = -1;
  double rho = 0.0;
  double field = 0.0;
  std::optional<bool> mean_center_flag;
  std::string chain = "transposition-walk";
  double lambda = 1.0;
  double beta = 0.0;
  double zeta = 0.0;
  std::uint64_t seed = 1;
  int instance = 0;
  double eta = 0.5;

  void add(CLI::App* app) {
    app->add_option("--config", config, "JSON experiment config supplying defaults");
    app->add_option("--graph", graph_file, "Graph file (overrides generation)");
    app->add_option("-n,--n", n, "Number of sites");
    app->add_option("--cost", cost, "maxcut-hamming | maxbisection | mis | mis-penalized | ising | sk");
    app->add_option("--model", model, "erdos-renyi | random-regular | complete");
    app->add_option("--edge-rule", edge_rule, "constant | log-density | average-degree");
    app->add_option("--edge-value", edge_value, "p, log-density factor or average degree");
    app->add_option("--degree", degree, "Degree for random-regular graphs");
    app->add_option("-k,--k", k, "Hamming weight (-1: cost default)");
    app->add_option("--rho", rho, "MIS penalty (<= 0: n)");
    app->add_option("--field", field, "Uniform Ising field");
    app->add_flag("--mean-center,!--no-mean-center", mean_center_flag, "Subtract E_pi[H] from the cost");
    app->add_option("--chain", chain, "Markov chain kind");
    app->add_option("--lambda", lambda, "Hardcore fugacity");
    app->add_option("--beta", beta, "Inverse temperature");
    app->add_option("--zeta", zeta, "Laziness in [0, 1)");
    app->add_option("--seed", seed, "Experiment seed");
    app->add_option("--instance", instance, "Instance id within the ensemble");
    app->add_option("--eta", eta, "Clamp parameter eta in (0, 1)");
  }

  ExperimentConfig to_config(const CLI::App* app) const {
    ExperimentConfig c = config.empty() ? ExperimentConfig{} : load_config(config);
    auto given = [&](const char* name) { return app->count(name) > 0 || config.empty(); };
    if (given("--cost")) c.cost = parse_cost_kind(cost);
    if (given("--model")) c.model = parse_graph_model(model);
    if (given("--edge-rule")) {
      if (edge_rule == "constant") c.edge_rule = EdgeRule::kConstant;
      else if (edge_rule == "log-density") c.edge_rule = EdgeRule::kLogDensity;
      else if (edge_rule == "average-degree") c.edge_rule = EdgeRule::kAverageDegree;
      else throw ValidationError("unknown edge rule '" + edge_rule + "'");
    }
    if (given("--edge-value")) c.edge_value = edge_value;
    if (given("--degree")) c.degree = degree;
    if (given("--k")) c.k = k;
    if (given("--rho")) c.rho = rho;
    if (given("--field")) c.field = field;
    if (mean_center_flag) c.mean_center = *mean_center_flag;
    if (given("--chain")) c.chain = parse_chain_kind(chain);
    if (given("--lambda")) c.chain_params.lambda = lambda;
    if (given("--beta")) c.chain_params.beta = beta;
    if (given("--zeta")) c.chain_params.zeta = zeta;
    if (given("--seed")) c.seed = seed;
    if (given("--eta")) c.eta = eta;
    if (given("--n") || c.n_values.empty()) c.n_values = {n};
    return c;
  }

  Problem build(const CLI::App* app, ExperimentConfig& cfg) const {
    cfg = to_config(app);
    const int size = cfg.n_values.front();
    InstanceSpec spec = instance_spec(cfg, size, instance);
    Graph g = graph_file.empty() ? gen_graph(spec) : load_graph(graph_file);
    spec.n = g.n;
    const CostSpec cost_spec = make_cost(spec, g);
    return build_problem(cost_spec, cfg.chain, cfg.chain_params, {.mean_center = cfg.mean_center});
  }
};

ojson metrics_json(const ShortPathMetrics& m) {
  return {{"b", m.b},           {"eta", m.eta},     {"overlap_init", m.overlap_init}, {"overlap_opt", m.overlap_opt},
          {"gap_D", m.gap_d},   {"gap_Hb", m.gap_hb}, {"e_b", m.e_b},                 {"eff_runtime", m.eff_runtime},
          {"degenerate", m.degenerate}, {"residual", m.residual}};
}

ojson problem_json(const Problem& p) {
  return {{"n", p.space->n()},
          {"k", p.space->k()},
          {"M", p.size()},
          {"cost", to_string(p.cost.kind)},
          {"chain", to_string(p.chain->kind())},
          {"edges", p.cost.graph.num_edges()},
          {"e_star", p.summary.e_star},
          {"pi_estar", p.summary.pi_estar},
          {"minimizers", p.summary.minimizers.size()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Short-path spectral laboratory"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0: hardware concurrency)");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a graph instance and write it to a file");
  InstanceFlags gen_flags;
  gen_flags.add(gen);
  std::string gen_out;
  gen->add_option("-o,--out", gen_out, "Output graph file (default: stdout)");

  // solve
  auto* solve = app.add_subcommand("solve", "Profile one instance at one b");
  InstanceFlags solve_flags;
  solve_flags.add(solve);
  double solve_b = 0.0;
  bool solve_conditions = false;
  bool solve_search = false;
  std::uint64_t search_budget = 100000;
  solve->add_option("-b,--b", solve_b, "Short-path strength b");
  solve->add_flag("--conditions", solve_conditions, "Include the condition report");
  solve->add_flag("--search", solve_search, "Also run one Markov chain search from the first state");
  solve->add_option("--search-budget", search_budget, "Sample budget for --search");

  // sweep-b
  auto* sweep = app.add_subcommand("sweep-b", "Profile one instance over a grid of b values (CSV)");
  InstanceFlags sweep_flags;
  sweep_flags.add(sweep);
  double sweep_from = 0.0, sweep_to = 1.25, sweep_step = 0.05;
  sweep->add_option("--from", sweep_from, "First b");
  sweep->add_option("--to", sweep_to, "Last b");
  sweep->add_option("--step", sweep_step, "b increment");

  // phase-b
  auto* phase = app.add_subcommand("phase-b", "Largest b with overlap_init above the threshold");
  InstanceFlags phase_flags;
  phase_flags.add(phase);
  PhaseOptions phase_opts;
  phase->add_option("--threshold", phase_opts.threshold, "overlap_init threshold");
  phase->add_option("--b-lo", phase_opts.b_lo, "Lower bracket");
  phase->add_option("--b-hi", phase_opts.b_hi, "Upper bracket");
  phase->add_option("--tol", phase_opts.tol, "Bisection tolerance");

  // run
  auto* run = app.add_subcommand("run", "Run an ensemble experiment from a config file");
  std::string run_config;
  std::optional<int> run_instances;
  std::optional<std::uint64_t> run_seed;
  std::optional<double> run_eta;
  std::vector<int> run_n;
  std::vector<double> run_b;
  std::string run_out, run_failures;
  run->add_option("--config", run_config, "JSON experiment config")->required();
  run->add_option("--n", run_n, "Override the n values");
  run->add_option("--instances-per-n", run_instances, "Override instances per n");
  run->add_option("--seed", run_seed, "Override the seed");
  run->add_option("--eta", run_eta, "Override eta");
  run->add_option("-b,--b", run_b, "Override with a fixed b policy");
  run->add_option("-o,--csv", run_out, "Override the CSV output path (default: stdout)");
  run->add_option("--failures", run_failures, "Override the failures CSV path");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit the worst-case scaling exponent of a results CSV");
  std::string fit_csv;
  std::string fit_response = "overlap_opt";
  std::optional<double> fit_b;
  fit->add_option("csv", fit_csv, "Results CSV")->required();
  fit->add_option("--response", fit_response, "overlap_opt | overlap_init | eff_runtime");
  fit->add_option("-b,--b", fit_b, "Use only rows with this b");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the cross-module invariant suite (JSON report)");
  bool verify_full = false;
  verify->add_flag("--full", verify_full, "Include the n = 24 ensemble smoke run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kValidation);
  }

  try {
    if (threads > 0) set_num_threads(threads);
    if (*gen) {
      const ExperimentConfig cfg = gen_flags.to_config(gen);
      const Graph g = gen_graph(instance_spec(cfg, cfg.n_values.front(), gen_flags.instance));
      if (gen_out.empty()) write_graph(std::cout, g);
      else save_graph(g, gen_out);
    } else if (*solve) {
      ExperimentConfig cfg;
      const Problem p = solve_flags.build(solve, cfg);
      const ShortPathMetrics m = profile(p, solve_b, cfg.eta).metrics;
      ojson out;
      out["instance"] = problem_json(p);
      out["metrics"] = metrics_json(m);
      if (solve_conditions)
        out["conditions"] = ojson::parse(to_json(condition_report(p, cfg.eta, solve_b, m.gap_d)));
      if (solve_search) {
        Rng rng(cfg.seed, 0x5ea4c4);
        SearchOptions so;
        so.budget = search_budget;
        const SearchOutcome s =
            markov_chain_search(*p.chain, p.cost, p.space->unrank(0), &p.summary, so, rng);
        out["search"] = {{"best_energy", s.best_energy},
                         {"best_state", s.best_state.to_string()},
                         {"samples_used", s.samples_used},
                         {"hit_optimum", s.hit_optimum},
                         {"steps_per_sample", s.steps_per_sample}};
      }
      std::cout << out.dump(2) << '\n';
    } else if (*sweep) {
      ExperimentConfig cfg;
      const Problem p = sweep_flags.build(sweep, cfg);
      if (!(sweep_step > 0.0)) throw ValidationError("--step must be positive");
      const double gap_d = discriminant_spectrum(p).gap();
      std::cout << "b,overlap_init,overlap_opt,gap_Hb,e_b,eff_runtime\n";
      ProfileOptions po;
      po.keep_ground = true;
      const long count = std::lround(std::floor((sweep_to - sweep_from) / sweep_step + 1e-9)) + 1;
      for (long i = 0; i < count; ++i) {
        const double b = sweep_from + static_cast<double>(i) * sweep_step;
        Profile pr = profile(p, b, cfg.eta, gap_d, po);
        const auto& m = pr.metrics;
        std::cout << format_double(b) << ',' << format_double(m.overlap_init) << ',' << format_double(m.overlap_opt)
                  << ',' << format_double(m.gap_hb) << ',' << format_double(m.e_b) << ','
                  << format_double(m.eff_runtime) << '\n';
        po.guess = std::move(pr.ground);
      }
    } else if (*phase) {
      ExperimentConfig cfg;
      const Problem p = phase_flags.build(phase, cfg);
      const PhaseResult r = phase_transition_b(p, cfg.eta, phase_opts);
      ojson out;
      out["instance"] = problem_json(p);
      out["phase_b"] = r.b;
      out["saturated"] = r.saturated;
      out["nonmonotone"] = r.nonmonotone;
      std::cout << out.dump(2) << '\n';
    } else if (*run) {
      ExperimentConfig cfg = load_config(run_config);
      if (!run_n.empty()) cfg.n_values = run_n;
      if (run_instances) cfg.instances_per_n = *run_instances;
      if (run_seed) cfg.seed = *run_seed;
      if (run_eta) cfg.eta = *run_eta;
      if (!run_b.empty()) {
        cfg.policy = BPolicy::kFixed;
        cfg.b_values = run_b;
      }
      if (!run_out.empty()) cfg.csv_path = run_out;
      if (!run_failures.empty()) cfg.failures_path = run_failures;
      if (threads > 0) cfg.threads = threads;
      const ExperimentResult res = run_experiment(cfg);
      if (cfg.csv_path.empty()) write_csv(std::cout, res.rows);
      std::cerr << res.rows.size() << " rows, " << res.failures.size() << " of " << res.attempted
                << " instances failed\n";
    } else if (*fit) {
      std::vector<ResultRow> rows = load_csv(fit_csv);
      if (fit_b) std::erase_if(rows, [&](const ResultRow& r) { return std::abs(r.b - *fit_b) > 1e-12; });
      FitResponse resp;
      if (fit_response == "overlap_opt") resp = FitResponse::kInverseOverlapOpt;
      else if (fit_response == "overlap_init") resp = FitResponse::kInverseOverlapInit;
      else if (fit_response == "eff_runtime") resp = FitResponse::kEffRuntime;
      else throw ValidationError("unknown response '" + fit_response + "'");
      const FitResult f = fit_exponent(rows, resp);
      ojson out;
      out["exponent"] = f.exponent;
      out["stderr"] = f.stderr_;
      out["ci95"] = {f.ci_lo, f.ci_hi};
      out["intercept"] = f.intercept;
      out["points"] = ojson::array();
      for (const auto& pt : f.points) out["points"].push_back({pt.log_size, pt.log_response});
      std::cout << out.dump(2) << '\n';
    } else if (*verify) {
      const VerifyReport rep = verify_suite(verify_full ? VerifyLevel::kFull : VerifyLevel::kFast);
      std::cout << rep.to_json() << '\n';
      return rep.all_pass() ? 0 : static_cast<int>(ExitCode::kFailure);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kFailure);
  }
  return 0;
}
