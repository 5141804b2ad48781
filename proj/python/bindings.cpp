// Python bindings: instance generation, single-instance profiles, ensembles and fits.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "splab/error.hpp"
#include "splab/experiment.hpp"
#include "splab/theory.hpp"

namespace py = pybind11;
using namespace splab;

namespace {

Problem problem_for(const ExperimentConfig& cfg, int n, int instance) {
  ProblemOptions po;
  po.mean_center = cfg.mean_center;
  return build_problem(instance_cost(cfg, n, instance), cfg.chain, cfg.chain_params, po);
}

py::dict metrics_dict(const ShortPathMetrics& m) {
  py::dict d;
  d["b"] = m.b;
  d["eta"] = m.eta;
  d["overlap_init"] = m.overlap_init;
  d["overlap_opt"] = m.overlap_opt;
  d["gap_D"] = m.gap_d;
  d["gap_Hb"] = m.gap_hb;
  d["e_b"] = m.e_b;
  d["eff_runtime"] = m.eff_runtime;
  d["degenerate"] = m.degenerate;
  return d;
}

py::dict problem_dict(const Problem& p) {
  py::dict d;
  d["n"] = p.space->n();
  d["k"] = p.space->k();
  d["M"] = p.size();
  d["e_star"] = p.summary.e_star;
  d["pi_estar"] = p.summary.pi_estar;
  d["mean_pi"] = p.summary.mean_pi;
  d["minimizers"] = p.summary.minimizers.size();
  return d;
}

py::dict fit_dict(const FitResult& f) {
  py::dict d;
  d["exponent"] = f.exponent;
  d["stderr"] = f.stderr_;
  d["ci95"] = py::make_tuple(f.ci_lo, f.ci_hi);
  d["intercept"] = f.intercept;
  py::list pts;
  for (const auto& p : f.points) pts.append(py::make_tuple(p.log_size, p.log_response));
  d["points"] = pts;
  return d;
}

FitResponse parse_response(const std::string& s) {
  if (s == "inverse-overlap-opt") return FitResponse::kInverseOverlapOpt;
  if (s == "inverse-overlap-init") return FitResponse::kInverseOverlapInit;
  if (s == "eff-runtime") return FitResponse::kEffRuntime;
  throw ValidationError("unknown fit response '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Short-path spectral laboratory (native core)";

  static py::exception<Error> base(m, "SplabError");
  static py::exception<ValidationError> validation(m, "ValidationError", base.ptr());
  static py::exception<CapacityError> capacity(m, "CapacityError", base.ptr());
  static py::exception<ConvergenceError> convergence(m, "ConvergenceError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      py::set_error(validation, e.what());
    } catch (const CapacityError& e) {
      py::set_error(capacity, e.what());
    } catch (const ConvergenceError& e) {
      py::set_error(convergence, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  m.def(
      "generate_graph",
      [](const std::string& config, int n, int instance) {
        const auto cfg = parse_config(config);
        std::ostringstream os;
        write_graph(os, gen_graph(instance_spec(cfg, n, instance)));
        return os.str();
      },
      py::arg("config"), py::arg("n"), py::arg("instance") = 0, "Graph file text for one ensemble member.");

  m.def(
      "solve",
      [](const std::string& config, int n, int instance, double b, bool conditions) {
        const auto cfg = parse_config(config);
        py::gil_scoped_release release;
        const Problem p = problem_for(cfg, n, instance);
        const Profile pr = profile(p, b, cfg.eta);
        std::optional<ConditionReport> cond;
        if (conditions) cond = condition_report(p, cfg.eta, b, pr.metrics.gap_d);
        py::gil_scoped_acquire acquire;
        py::dict d;
        d["instance"] = problem_dict(p);
        d["metrics"] = metrics_dict(pr.metrics);
        if (cond) d["conditions"] = py::module_::import("json").attr("loads")(to_json(*cond));
        return d;
      },
      py::arg("config"), py::arg("n"), py::arg("instance") = 0, py::arg("b") = 0.0, py::arg("conditions") = false,
      "Spectral profile of H_b for one instance.");

  m.def(
      "phase_b",
      [](const std::string& config, int n, int instance, double threshold) {
        const auto cfg = parse_config(config);
        PhaseOptions po = cfg.phase;
        po.threshold = threshold;
        PhaseResult r;
        {
          py::gil_scoped_release release;
          r = phase_transition_b(problem_for(cfg, n, instance), cfg.eta, po);
        }
        py::dict d;
        d["b"] = r.b;
        d["saturated"] = r.saturated;
        d["nonmonotone"] = r.nonmonotone;
        return d;
      },
      py::arg("config"), py::arg("n"), py::arg("instance") = 0, py::arg("threshold") = 0.99,
      "Smallest b where overlap_init drops below the threshold.");

  m.def(
      "run",
      [](const std::string& config) {
        const auto cfg = parse_config(config);
        ExperimentResult res;
        {
          py::gil_scoped_release release;
          res = run_experiment(cfg);
        }
        std::ostringstream os;
        write_csv(os, res.rows);
        py::list failures;
        for (const auto& f : res.failures) failures.append(py::make_tuple(f.n, f.instance, f.reason));
        return py::make_tuple(os.str(), failures);
      },
      py::arg("config"), "Runs an ensemble; returns (csv text, failures).");

  m.def(
      "fit_csv",
      [](const std::string& csv, const std::string& response) {
        std::istringstream in(csv);
        return fit_dict(fit_exponent(read_csv(in), parse_response(response)));
      },
      py::arg("csv"), py::arg("response") = "inverse-overlap-opt", "Worst-per-size power-law fit of a result CSV.");

  m.def(
      "fit_power_law",
      [](const std::vector<double>& sizes, const std::vector<double>& responses) {
        return fit_dict(fit_power_law(sizes, responses));
      },
      py::arg("sizes"), py::arg("responses"));

  m.def(
      "verify",
      [](bool full) {
        VerifyReport r;
        {
          py::gil_scoped_release release;
          r = verify_suite(full ? VerifyLevel::kFull : VerifyLevel::kFast);
        }
        return r.to_json();
      },
      py::arg("full") = false, "Invariant suite report as JSON text.");

  m.def("g_eta", &g_eta, py::arg("x"), py::arg("eta"));
  m.def("b_star_poincare", &b_star_poincare, py::arg("delta"));
  m.def("b_star_log_sobolev", &b_star_log_sobolev, py::arg("gamma"), py::arg("omega"), py::arg("pi_estar"));
  m.def(
      "predicted_exponent",
      [](double b, double eta, double e_star, double pi_estar, double delta_p) {
        return predicted_exponent(b, eta, e_star, pi_estar, delta_p).value;
      },
      py::arg("b"), py::arg("eta"), py::arg("e_star"), py::arg("pi_estar"), py::arg("delta_p"));
  m.attr("CSV_HEADER") = kCsvHeader;
}
