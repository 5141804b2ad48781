#include "splab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "json.hpp"
#include "splab/error.hpp"
#include "splab/parallel.hpp"
#include "splab/rng.hpp"
#include "splab/theory.hpp"

namespace splab {

using json = nlohmann::json;

std::string_view to_string(BPolicy p) {
  switch (p) {
    case BPolicy::kFixed: return "fixed";
    case BPolicy::kPhaseTransition: return "phase-transition";
    case BPolicy::kRuntimeOptimal: return "runtime-optimal";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (n_values.empty()) throw ValidationError("config: n range is empty");
  for (int n : n_values)
    if (n < 2 || n > kDefaultSiteCap) throw ValidationError("config: n = " + std::to_string(n) + " outside [2, 30]");
  if (instances_per_n < 1) throw ValidationError("config: instances_per_n must be at least 1");
  if (!(eta > 0.0 && eta < 1.0)) throw ValidationError("config: eta must lie in (0, 1)");
  if (policy == BPolicy::kFixed && b_values.empty()) throw ValidationError("config: fixed policy needs b values");
  if (policy == BPolicy::kRuntimeOptimal && b_grid.empty()) throw ValidationError("config: runtime grid is empty");
  for (double b : b_values)
    if (!(b >= 0.0)) throw ValidationError("config: b must be nonnegative");
  for (double b : b_grid)
    if (!(b >= 0.0)) throw ValidationError("config: grid b must be nonnegative");
  if (!(max_failure_fraction >= 0.0 && max_failure_fraction <= 1.0))
    throw ValidationError("config: max_failure_fraction must lie in [0, 1]");
  if (edge_rule == EdgeRule::kConstant && !(edge_value >= 0.0 && edge_value <= 1.0))
    throw ValidationError("config: constant edge probability must lie in [0, 1]");
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) == keys.end())
      throw ValidationError("config: unknown key '" + key + "' in " + where);
}

std::vector<double> parse_range(const json& v, const std::string& where) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& x : v) out.push_back(x.get<double>());
  } else if (v.is_object()) {
    reject_unknown(v, {"from", "to", "step"}, where);
    const double from = v.at("from").get<double>(), to = v.at("to").get<double>();
    const double step = v.value("step", 1.0);
    if (!(step > 0.0)) throw ValidationError("config: " + where + " step must be positive");
    const long count = std::lround(std::floor((to - from) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) out.push_back(from + static_cast<double>(i) * step);
  } else {
    throw ValidationError("config: " + where + " must be a number, a list, or {from, to, step}");
  }
  return out;
}

EdgeRule parse_edge_rule(const std::string& s) {
  if (s == "constant") return EdgeRule::kConstant;
  if (s == "log-density") return EdgeRule::kLogDensity;
  if (s == "average-degree") return EdgeRule::kAverageDegree;
  throw ValidationError("config: unknown edge_rule '" + s + "'");
}

int line_of(const std::string& text, std::size_t byte) {
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + std::min(byte, text.size()), '\n'));
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), line_of(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  ExperimentConfig c;
  try {
    reject_unknown(j, {"name", "problem", "chain", "n", "instances_per_n", "eta", "b_policy", "theory_columns", "seed",
                       "threads", "max_failure_fraction", "output"},
                   "top level");
    for (const char* key : {"problem", "chain", "n"})
      if (!j.contains(key)) throw ValidationError(std::string("config: missing required key '") + key + "'");
    c.name = j.value("name", c.name);
    const json& prob = j.at("problem");
    reject_unknown(prob, {"cost", "graph", "k", "rho", "field", "mean_center"}, "problem");
    c.cost = parse_cost_kind(prob.at("cost").get<std::string>());
    if (prob.contains("graph")) {
      const json& g = prob.at("graph");
      reject_unknown(g, {"model", "edge_rule", "edge_value", "degree"}, "problem.graph");
      c.model = parse_graph_model(g.value("model", std::string("erdos-renyi")));
      if (g.contains("edge_rule")) c.edge_rule = parse_edge_rule(g.at("edge_rule").get<std::string>());
      c.edge_value = g.value("edge_value", c.edge_value);
      c.degree = g.value("degree", c.degree);
    }
    c.k = prob.value("k", c.k);
    c.rho = prob.value("rho", c.rho);
    c.field = prob.value("field", c.field);
    c.mean_center = prob.value("mean_center", c.mean_center);

    const json& ch = j.at("chain");
    reject_unknown(ch, {"kind", "lambda", "beta", "field", "zeta"}, "chain");
    c.chain = parse_chain_kind(ch.at("kind").get<std::string>());
    c.chain_params.lambda = ch.value("lambda", c.chain_params.lambda);
    c.chain_params.beta = ch.value("beta", c.chain_params.beta);
    c.chain_params.field = ch.value("field", c.chain_params.field);
    c.chain_params.zeta = ch.value("zeta", c.chain_params.zeta);

    for (double n : parse_range(j.at("n"), "n")) c.n_values.push_back(static_cast<int>(std::lround(n)));
    c.instances_per_n = j.value("instances_per_n", c.instances_per_n);
    c.eta = j.value("eta", c.eta);

    if (j.contains("b_policy")) {
      const json& bp = j.at("b_policy");
      const std::string kind = bp.at("kind").get<std::string>();
      if (kind == "fixed") {
        reject_unknown(bp, {"kind", "b"}, "b_policy");
        c.policy = BPolicy::kFixed;
        c.b_values = parse_range(bp.at("b"), "b_policy.b");
      } else if (kind == "phase-transition") {
        reject_unknown(bp, {"kind", "threshold", "b_lo", "b_hi", "tol", "grid_step"}, "b_policy");
        c.policy = BPolicy::kPhaseTransition;
        c.phase.threshold = bp.value("threshold", c.phase.threshold);
        c.phase.b_lo = bp.value("b_lo", c.phase.b_lo);
        c.phase.b_hi = bp.value("b_hi", c.phase.b_hi);
        c.phase.tol = bp.value("tol", c.phase.tol);
        c.phase.grid_step = bp.value("grid_step", c.phase.grid_step);
      } else if (kind == "runtime-optimal") {
        reject_unknown(bp, {"kind", "grid"}, "b_policy");
        c.policy = BPolicy::kRuntimeOptimal;
        c.b_grid = bp.contains("grid") ? parse_range(bp.at("grid"), "b_policy.grid")
                                       : parse_range(json{{"from", 0.0}, {"to", 1.25}, {"step", 0.05}}, "grid");
      } else {
        throw ValidationError("config: unknown b_policy kind '" + kind + "'");
      }
    }
    c.theory_columns = j.value("theory_columns", c.theory_columns);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.max_failure_fraction = j.value("max_failure_fraction", c.max_failure_fraction);
    if (j.contains("output")) {
      const json& o = j.at("output");
      reject_unknown(o, {"csv", "failures"}, "output");
      if (o.contains("csv")) c.csv_path = o.at("csv").get<std::string>();
      if (o.contains("failures")) c.failures_path = o.at("failures").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t instance_seed(std::uint64_t seed, int n, int instance) {
  return Rng(seed, (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint32_t>(instance)).key();
}

InstanceSpec instance_spec(const ExperimentConfig& cfg, int n, int instance) {
  InstanceSpec s;
  s.n = n;
  s.model = cfg.model;
  switch (cfg.edge_rule) {
    case EdgeRule::kConstant: s.p_edge = cfg.edge_value; break;
    case EdgeRule::kLogDensity: s.p_edge = log_density_edge_probability(n, cfg.edge_value); break;
    case EdgeRule::kAverageDegree: s.p_edge = average_degree_edge_probability(n, cfg.edge_value); break;
  }
  s.degree = cfg.degree;
  s.cost = cfg.cost;
  s.k = cfg.k;
  s.rho = cfg.rho;
  s.lambda = cfg.chain_params.lambda;
  s.beta = cfg.chain_params.beta;
  s.field = cfg.field;
  s.seed = instance_seed(cfg.seed, n, instance);
  return s;
}

CostSpec instance_cost(const ExperimentConfig& cfg, int n, int instance) {
  const InstanceSpec spec = instance_spec(cfg, n, instance);
  return make_cost(spec, gen_graph(spec));
}

std::vector<ResultRow> run_instance(const ExperimentConfig& cfg, int n, int instance,
                                    std::shared_ptr<const SparseMatrix> shared_d, std::optional<double> shared_gap_d) {
  const InstanceSpec spec = instance_spec(cfg, n, instance);
  const CostSpec cost = make_cost(spec, gen_graph(spec));
  ProblemOptions po;
  po.mean_center = cfg.mean_center;
  po.discriminant = std::move(shared_d);
  const Problem p = build_problem(cost, cfg.chain, cfg.chain_params, po);
  const double gap_d = shared_gap_d ? *shared_gap_d : discriminant_spectrum(p).gap();

  ResultRow base;
  base.n = n;
  base.k = p.space->k();
  base.seed = spec.seed;
  base.instance = instance;
  base.m = p.size();
  base.eta = cfg.eta;
  base.e_star = p.summary.e_star;
  base.pi_estar = p.summary.pi_estar;
  if (cfg.theory_columns) {
    const Stability st = delta_p_stability(*p.chain, p.summary.energies, p.summary.e_star, cfg.eta);
    base.delta_p_eta = st.delta_p_eta;
    base.pseudo_lip = pseudo_lipschitz(*p.chain, p.summary.energies);
    base.gamma_emp = spectral_density(p.summary.energies, p.pi.pi, cfg.eta, p.summary).gamma_emp;
  }
  auto fill = [&](const ShortPathMetrics& m) {
    ResultRow r = base;
    r.b = m.b;
    r.overlap_init = m.overlap_init;
    r.overlap_opt = m.overlap_opt;
    r.gap_d = m.gap_d;
    r.gap_hb = m.gap_hb;
    r.e_b = m.e_b;
    r.eff_runtime = m.eff_runtime;
    return r;
  };

  std::vector<ResultRow> rows;
  switch (cfg.policy) {
    case BPolicy::kFixed: {
      ProfileOptions opts;
      opts.keep_ground = true;
      for (double b : cfg.b_values) {
        Profile pr = profile(p, b, cfg.eta, gap_d, opts);
        rows.push_back(fill(pr.metrics));
        opts.guess = std::move(pr.ground);
      }
      break;
    }
    case BPolicy::kPhaseTransition: {
      const PhaseResult ph = phase_transition_b(p, cfg.eta, cfg.phase);
      ResultRow r = fill(profile(p, ph.b, cfg.eta, gap_d).metrics);
      r.phase_b = ph.b;
      rows.push_back(r);
      break;
    }
    case BPolicy::kRuntimeOptimal: {
      const RuntimeOptimum opt = runtime_optimal_b(p, cfg.eta, cfg.b_grid);
      rows.push_back(fill(opt.metrics));
      break;
    }
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.threads > 0) set_num_threads(cfg.threads);
  struct Job {
    int n;
    int instance;
  };
  std::vector<Job> jobs;
  for (int n : cfg.n_values)
    for (int i = 0; i < cfg.instances_per_n; ++i) jobs.push_back({n, i});

  // Walks whose kernel ignores the graph share one discriminant per n.
  std::map<int, std::pair<std::shared_ptr<const SparseMatrix>, double>> shared;
  const bool graph_free = cfg.chain == ChainKind::kHypercubeWalk || cfg.chain == ChainKind::kTranspositionWalk;

  std::vector<std::vector<ResultRow>> rows(jobs.size());
  std::vector<std::optional<std::string>> errors(jobs.size());
  for (int n : cfg.n_values) {
    std::shared_ptr<const SparseMatrix> d;
    std::optional<double> gap;
    if (graph_free) {
      try {
        const CostSpec cost = instance_cost(cfg, n, 0);
        const StateSpacePtr space = space_for(cfg.chain, cost);
        const Chain chain(cfg.chain, space, cost.graph, cfg.chain_params);
        const StationaryDist pi = stationary(chain);
        d = std::make_shared<const SparseMatrix>(discriminant(chain, pi));
        ShiftedOperator neg_d(*d, -1.0, std::vector<double>(d->dim(), 0.0));
        EigenOptions eo;
        eo.guess = pi.sqrt_pi();
        gap = lowest_two_eigs(neg_d, eo).gap();
      } catch (const Error&) {
        d.reset();  // fall back to per-instance construction, which records the error
        gap.reset();
      }
    }
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < jobs.size(); ++j)
      if (jobs[j].n == n) idx.push_back(j);
    parallel_jobs(idx.size(), [&](std::size_t t) {
      const Job& job = jobs[idx[t]];
      try {
        rows[idx[t]] = run_instance(cfg, job.n, job.instance, d, gap);
      } catch (const Error& e) {
        errors[idx[t]] = e.what();
      }
    });
  }

  ExperimentResult res;
  res.attempted = jobs.size();
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    for (auto& r : rows[j]) res.rows.push_back(std::move(r));
    if (errors[j]) res.failures.push_back({jobs[j].n, jobs[j].instance, *errors[j]});
  }
  if (!cfg.csv_path.empty()) save_csv(cfg.csv_path, res.rows);
  if (!cfg.failures_path.empty()) {
    std::ofstream f(cfg.failures_path);
    f << "n,instance_id,reason\n";
    for (const auto& fl : res.failures) {
      std::string reason = fl.reason;
      std::replace(reason.begin(), reason.end(), '"', '\'');
      f << fl.n << ',' << fl.instance << ",\"" << reason << "\"\n";
    }
  }
  if (static_cast<double>(res.failures.size()) > cfg.max_failure_fraction * static_cast<double>(res.attempted))
    throw Error("experiment '" + cfg.name + "': " + std::to_string(res.failures.size()) + " of " +
                std::to_string(res.attempted) + " instances failed");
  return res;
}

namespace {

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    if (s == "inf") return INFINITY;
    if (s == "nan") return NAN;
    throw ParseError("bad number '" + s + "'", line);
  }
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.n << ',' << r.k << ',' << r.seed << ',' << r.instance << ',' << r.m << ',' << format_double(r.b) << ','
        << format_double(r.eta) << ',' << format_double(r.e_star) << ',' << format_double(r.pi_estar) << ','
        << format_double(r.overlap_init) << ',' << format_double(r.overlap_opt) << ',' << format_double(r.gap_d) << ','
        << format_double(r.gap_hb) << ',' << format_double(r.e_b) << ',' << format_double(r.eff_runtime) << ','
        << opt_field(r.delta_p_eta) << ',' << opt_field(r.pseudo_lip) << ',' << opt_field(r.gamma_emp) << ','
        << opt_field(r.phase_b) << '\n';
  }
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw ParseError("unexpected CSV header (schema v1 expected)", 1);
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 19) throw ParseError("expected 19 fields, found " + std::to_string(f.size()), lineno);
    ResultRow r;
    r.n = static_cast<int>(parse_double(f[0], lineno));
    r.k = static_cast<int>(parse_double(f[1], lineno));
    try {
      r.seed = std::stoull(f[2]);
    } catch (const std::exception&) {
      throw ParseError("bad seed", lineno);
    }
    r.instance = static_cast<int>(parse_double(f[3], lineno));
    r.m = static_cast<std::size_t>(parse_double(f[4], lineno));
    double* cols[] = {&r.b, &r.eta, &r.e_star, &r.pi_estar, &r.overlap_init, &r.overlap_opt,
                      &r.gap_d, &r.gap_hb, &r.e_b, &r.eff_runtime};
    for (int c = 0; c < 10; ++c) *cols[c] = parse_double(f[5 + c], lineno);
    std::optional<double>* opts[] = {&r.delta_p_eta, &r.pseudo_lip, &r.gamma_emp, &r.phase_b};
    for (int c = 0; c < 4; ++c)
      if (!f[15 + c].empty()) *opts[c] = parse_double(f[15 + c], lineno);
    rows.push_back(r);
  }
  return rows;
}

void save_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  write_csv(out, rows);
}

std::vector<ResultRow> load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return read_csv(in);
}

FitResult fit_power_law(const std::vector<double>& sizes, const std::vector<double>& responses) {
  if (sizes.size() != responses.size()) throw ValidationError("fit: sizes and responses differ in length");
  if (sizes.size() < 3) throw ValidationError("fit needs at least 3 distinct sizes");
  FitResult f;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!(sizes[i] > 0.0) || !(responses[i] > 0.0) || !std::isfinite(responses[i]))
      throw ValidationError("fit: sizes and responses must be positive and finite");
    f.points.push_back({std::log2(sizes[i]), std::log2(responses[i])});
  }
  std::sort(f.points.begin(), f.points.end(),
            [](const FitPoint& a, const FitPoint& b) { return a.log_size < b.log_size; });
  const double n = static_cast<double>(f.points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : f.points) {
    mx += p.log_size;
    my += p.log_response;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : f.points) {
    sxx += (p.log_size - mx) * (p.log_size - mx);
    sxy += (p.log_size - mx) * (p.log_response - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("fit needs at least 3 distinct sizes");
  f.exponent = sxy / sxx;
  f.intercept = my - f.exponent * mx;
  double ssr = 0.0;
  for (const auto& p : f.points) {
    const double e = p.log_response - (f.intercept + f.exponent * p.log_size);
    ssr += e * e;
  }
  f.stderr_ = std::sqrt(ssr / (n - 2.0) / sxx);
  f.ci_lo = f.exponent - 1.96 * f.stderr_;
  f.ci_hi = f.exponent + 1.96 * f.stderr_;
  return f;
}

FitResult fit_exponent(const std::vector<ResultRow>& rows, FitResponse response) {
  std::map<std::size_t, double> worst;  // keyed by feasible-space size
  for (const auto& r : rows) {
    double y = 0.0;
    switch (response) {
      case FitResponse::kInverseOverlapOpt: y = 1.0 / r.overlap_opt; break;
      case FitResponse::kInverseOverlapInit: y = 1.0 / r.overlap_init; break;
      case FitResponse::kEffRuntime: y = r.eff_runtime; break;
    }
    auto [it, inserted] = worst.emplace(r.m, y);
    if (!inserted) it->second = std::max(it->second, y);
  }
  std::vector<double> xs, ys;
  for (const auto& [m, y] : worst) {
    xs.push_back(static_cast<double>(m));
    ys.push_back(y);
  }
  return fit_power_law(xs, ys);
}

bool VerifyReport::all_pass() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.pass; });
}

std::string VerifyReport::to_json() const {
  nlohmann::ordered_json j;
  j["pass"] = all_pass();
  j["checks"] = json::array();
  for (const auto& c : checks) j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return j.dump(2);
}

namespace {

Graph random_graph(int n, double p, std::uint64_t seed) { return erdos_renyi(n, p, seed); }

CostSpec cost_for(CostKind kind, const Graph& g, int k = -1) {
  CostSpec c;
  c.kind = kind;
  c.graph = g;
  c.k = k;
  if (kind == CostKind::kMisPenalized) c.rho = g.n;
  return c;
}

}  // namespace

VerifyReport verify_suite(VerifyLevel level) {
  VerifyReport rep;
  auto check = [&](const std::string& name, auto&& fn) {
    VerifyCheck c;
    c.name = name;
    try {
      c.detail = fn();
      c.pass = c.detail.rfind("FAIL", 0) != 0;
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = std::string("exception: ") + e.what();
    }
    rep.checks.push_back(c);
  };

  struct Case {
    CostKind cost;
    ChainKind chain;
    ChainParams params;
  };
  const std::vector<Case> cases = {
      {CostKind::kMaxCutHamming, ChainKind::kTranspositionWalk, {}},
      {CostKind::kMis, ChainKind::kGlauberHardcore, {.lambda = 1.5}},
      {CostKind::kIsing, ChainKind::kGlauberIsing, {.beta = 0.4}},
      {CostKind::kSk, ChainKind::kGlauberSk, {.beta = 0.7}},
      {CostKind::kMisPenalized, ChainKind::kHypercubeWalk, {}},
  };
  auto build = [&](const Case& cs, int n, std::uint64_t seed) {
    Graph g = random_graph(n, 0.5, seed);
    if (cs.cost == CostKind::kSk) {
      Rng rng(seed, 99);
      g.weights.resize(g.edges.size());
      for (auto& w : g.weights) w = rng.normal();
    }
    const int k = cs.cost == CostKind::kMaxCutHamming ? 3 : -1;
    ProblemOptions po;
    po.mean_center = cs.cost == CostKind::kSk;
    return build_problem(cost_for(cs.cost, g, k), cs.chain, cs.params, po);
  };

  check("detailed balance and stochasticity", [&]() -> std::string {
    double worst_db = 0.0, worst_row = 0.0;
    for (const auto& cs : cases)
      for (std::uint64_t s = 1; s <= 5; ++s) {
        const Problem p = build(cs, 8, s);
        const BalanceReport b = check_balance(*p.chain, p.pi);
        worst_db = std::max(worst_db, b.detailed_balance);
        worst_row = std::max(worst_row, b.row_sum);
      }
    const bool ok = worst_db <= 1e-12 && worst_row <= 1e-14;
    return std::string(ok ? "" : "FAIL ") + "balance=" + format_double(worst_db) + " rows=" + format_double(worst_row);
  });

  check("sqrt(pi) is fixed by D(P)", [&]() -> std::string {
    double worst = 0.0;
    for (const auto& cs : cases) {
      const Problem p = build(cs, 9, 3);
      const auto v = p.d->matvec(p.sqrt_pi);
      for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(v[i] - p.sqrt_pi[i]));
    }
    return std::string(worst <= 1e-10 ? "" : "FAIL ") + "max deviation " + format_double(worst);
  });

  check("Lanczos matches dense", [&]() -> std::string {
    double worst = 0.0;
    for (const auto& cs : cases)
      for (std::uint64_t s = 1; s <= 3; ++s) {
        const Problem p = build(cs, 8, s);
        const SparseMatrix hb = assemble_Hb(*p.d, p.summary, 0.7, 0.5);
        EigenOptions lo;
        lo.strategy = EigenStrategy::kLanczos;
        EigenOptions de;
        de.strategy = EigenStrategy::kDense;
        const auto a = lowest_two_eigs(hb, lo), b = lowest_two_eigs(hb, de);
        worst = std::max({worst, std::abs(a.lambda0 - b.lambda0), std::abs(a.lambda1 - b.lambda1)});
      }
    return std::string(worst <= 1e-9 ? "" : "FAIL ") + "max eigenvalue difference " + format_double(worst);
  });

  check("b = 0 limit", [&]() -> std::string {
    double worst = 0.0;
    for (const auto& cs : cases) {
      const Problem p = build(cs, 8, 4);
      const auto m = profile(p, 0.0, 0.5).metrics;
      worst = std::max({worst, std::abs(m.overlap_init - 1.0), std::abs(m.e_b + 1.0),
                        std::abs(m.overlap_opt * m.overlap_opt - p.summary.pi_estar)});
    }
    return std::string(worst <= 1e-9 ? "" : "FAIL ") + "max deviation " + format_double(worst);
  });

  check("closed-form slice mean", [&]() -> std::string {
    double worst = 0.0;
    for (std::uint64_t s = 1; s <= 10; ++s) {
      const Graph g = random_graph(10, 0.4, s);
      const CostSpec c = cost_for(CostKind::kMaxCutHamming, g, 3);
      const StateSpace sp = StateSpace::hamming_slice(10, 3);
      const std::vector<double> pi(sp.size(), 1.0 / static_cast<double>(sp.size()));
      const EnergySummary e = enumerate_energies(c, sp, pi);
      worst = std::max(worst, std::abs(e.mean_pi - mean_energy_closed_form(c, 3)));
    }
    return std::string(worst <= 1e-12 ? "" : "FAIL ") + "max difference " + format_double(worst);
  });

  check("stability ordering", [&]() -> std::string {
    double worst = -1.0;
    for (const auto& cs : cases) {
      const Problem p = build(cs, 8, 6);
      const Stability st = delta_p_stability(*p.chain, p.summary.energies, p.summary.e_star, 0.5);
      const double plip = pseudo_lipschitz(*p.chain, p.summary.energies);
      worst = std::max({worst, st.delta_p_eta - st.delta_tilde, st.delta_tilde - std::sqrt(plip)});
    }
    return std::string(worst <= 1e-12 ? "" : "FAIL ") + "max ordering excess " + format_double(worst);
  });

  // A sign flip of g_eta makes lambda0 increase with b; the monotonicity check must notice.
  check("ground energy monotone in b (and detects a flipped clamp)", [&]() -> std::string {
    const Problem p = build(cases[0], 10, 2);
    auto lambda0 = [&](double b, double sign) {
      auto diag = hb_diagonal(p.summary.energies, p.summary.e_star, b, 0.5);
      for (auto& d : diag) d *= sign;
      ShiftedOperator op(*p.d, -1.0, diag);
      EigenOptions eo;
      eo.nev = 1;
      return lowest_two_eigs(op, eo).lambda0;
    };
    auto monotone = [&](double sign) {
      double prev = lambda0(0.0, sign);
      if (prev > -1.0 + 1e-9) return false;
      for (double b = 0.25; b <= 2.0; b += 0.25) {
        const double cur = lambda0(b, sign);
        if (cur > prev + 1e-10 || cur > -1.0 + 1e-9) return false;
        prev = cur;
      }
      return true;
    };
    const bool ok = monotone(1.0), mutant_caught = !monotone(-1.0);
    return std::string(ok && mutant_caught ? "" : "FAIL ") + "monotone=" + (ok ? "yes" : "no") +
           " mutant_caught=" + (mutant_caught ? "yes" : "no");
  });

  check("graph file round trip", [&]() -> std::string {
    Graph g = complete_graph(8);
    Rng rng(5);
    g.weights.resize(g.edges.size());
    for (auto& w : g.weights) w = rng.normal();
    std::stringstream ss;
    write_graph(ss, g);
    const Graph back = read_graph(ss);
    return back == g ? "identical" : "FAIL mismatch";
  });

  if (level == VerifyLevel::kFull) {
    check("n = 24 ensemble smoke run", [&]() -> std::string {
      ExperimentConfig cfg;
      cfg.name = "verify-n24";
      cfg.mean_center = true;
      cfg.n_values = {24};
      cfg.instances_per_n = 2;
      cfg.policy = BPolicy::kPhaseTransition;
      cfg.theory_columns = false;
      const auto res = run_experiment(cfg);
      std::string detail;
      bool ok = res.failures.empty() && res.rows.size() == 2;
      for (const auto& r : res.rows) {
        ok = ok && r.phase_b && *r.phase_b > 0.0 && *r.phase_b <= 2.0;
        detail += "phase_b=" + (r.phase_b ? format_double(*r.phase_b) : std::string("none")) + " ";
      }
      return std::string(ok ? "" : "FAIL ") + detail;
    });
  }
  return rep;
}

}  // namespace splab
