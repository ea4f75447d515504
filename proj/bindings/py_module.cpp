// Python surface for the calibration engine. Thin translation layer only:
// strings in, plain dicts and lists out, all numerics delegated to the C++
// core.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "accrue/csv.hpp"
#include "accrue/dataset.hpp"
#include "accrue/distributions.hpp"
#include "accrue/model_io.hpp"
#include "accrue/pipeline.hpp"
#include "accrue/scoring.hpp"
#include "accrue/synthetic.hpp"

namespace py = pybind11;
using namespace accrue;

namespace {

DistributionParams parse_params(const std::string& family,
                                const std::vector<double>& params) {
  const Family f = family_from_name(family);
  if (static_cast<int>(params.size()) != family_arity(f)) {
    throw std::invalid_argument(family + " takes " +
                                std::to_string(family_arity(f)) + " parameter(s)");
  }
  return make_params(f, params[0], params.size() > 1 ? params[1] : 0.0);
}

py::dict metrics_dict(const MetricsReport& m) {
  py::dict d;
  d["n"] = m.n;
  d["beta"] = m.beta;
  d["crps"] = m.crps_mean;
  d["rs"] = m.rs;
  d["accrue"] = m.accrue;
  d["mae"] = m.mae;
  d["coverage50"] = m.coverage50;
  d["coverage95"] = m.coverage95;
  return d;
}

py::dict dataset_dict(const Dataset& data) {
  py::list xs, ms, ys;
  for (const PairRecord& r : data.records) {
    xs.append(r.x);
    ms.append(r.m);
    ys.append(r.y);
  }
  py::dict d;
  d["x"] = xs;
  d["m"] = ms;
  d["y"] = ys;
  return d;
}

CalibrateOptions build_options(const std::string& family, std::size_t members,
                               std::uint64_t seed, std::optional<double> beta,
                               std::size_t jobs, std::optional<std::size_t> max_epochs) {
  CalibrateOptions opt;
  if (family == "auto") {
    opt.auto_family = true;
  } else {
    opt.family = family_from_name(family);
  }
  opt.members = members;
  opt.seed = seed;
  opt.beta_override = beta;
  opt.jobs = jobs;
  if (max_epochs) opt.cfg.max_epochs = *max_epochs;
  return opt;
}

py::dict outcome_dict(const CalibrationOutcome& out,
                      const std::optional<std::string>& save_path) {
  if (save_path) save_model(*save_path, out.selected_run().median);
  py::dict d;
  d["selected_family"] = family_name(out.selected);
  d["family_tie"] = out.family_tie;
  d["seed"] = out.seed;
  d["beta_star"] = out.selected_run().beta.beta_star.value();
  d["metrics"] = metrics_dict(out.selected_run().metrics);
  d["report"] = out.report;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Probabilistic forecast calibration: CRPS/RS scoring, synthetic "
              "scenario generation, and the full ensemble pipeline.";

  // ---- scoring ----
  mod.def("gaussian_crps", &gaussian_crps, py::arg("eps"), py::arg("sigma"));
  mod.def("tpg_crps", &tpg_crps, py::arg("eps"), py::arg("sigma1"), py::arg("sigma2"));
  mod.def("al_crps", &al_crps, py::arg("eps"), py::arg("lambda_"), py::arg("kappa"));
  mod.def(
      "crps",
      [](const std::string& family, const std::vector<double>& params, double eps) {
        return crps(parse_params(family, params), eps);
      },
      py::arg("family"), py::arg("params"), py::arg("eps"));
  mod.def(
      "pdf",
      [](const std::string& family, const std::vector<double>& params, double eps) {
        return pdf(parse_params(family, params), eps);
      },
      py::arg("family"), py::arg("params"), py::arg("eps"));
  mod.def(
      "cdf",
      [](const std::string& family, const std::vector<double>& params, double eps) {
        return cdf(parse_params(family, params), eps);
      },
      py::arg("family"), py::arg("params"), py::arg("eps"));
  mod.def(
      "quantile",
      [](const std::string& family, const std::vector<double>& params, double p) {
        return quantile(parse_params(family, params), p);
      },
      py::arg("family"), py::arg("params"), py::arg("p"));
  mod.def(
      "reliability_score",
      [](std::vector<double> u) {
        std::sort(u.begin(), u.end());
        return reliability_score_uniform(u);
      },
      py::arg("pit_values"), "RS of a PIT sample (sorted internally).");
  mod.def(
      "accrue_loss",
      [](double crps_mean, double rs, double beta) {
        return accrue_loss(ScorePair{crps_mean, rs}, BetaWeight(beta));
      },
      py::arg("crps_mean"), py::arg("rs"), py::arg("beta"));
  mod.def(
      "gaussian_beta_heuristic",
      [](const std::vector<double>& errors) {
        return gaussian_beta_heuristic(errors).value();
      },
      py::arg("errors"));

  // ---- synthetic data ----
  mod.def(
      "generate",
      [](const std::string& scenario, std::size_t n, std::uint64_t seed) {
        return dataset_dict(generate(scenario_from_name(scenario), n, seed));
      },
      py::arg("scenario"), py::arg("n"), py::arg("seed"));
  mod.def(
      "generate_csv",
      [](const std::string& scenario, std::size_t n, std::uint64_t seed,
         const std::string& path) {
        write_data_csv(path, generate(scenario_from_name(scenario), n, seed));
      },
      py::arg("scenario"), py::arg("n"), py::arg("seed"), py::arg("path"));

  // ---- calibration pipeline ----
  mod.def(
      "calibrate_scenario",
      [](const std::string& scenario, std::size_t n, const std::string& family,
         std::size_t members, std::uint64_t seed, std::optional<double> beta,
         std::size_t jobs, std::optional<std::size_t> max_epochs,
         std::optional<std::string> out) {
        const CalibrateOptions opt =
            build_options(family, members, seed, beta, jobs, max_epochs);
        return outcome_dict(calibrate_scenario(scenario_from_name(scenario), n, opt),
                            out);
      },
      py::arg("scenario"), py::arg("n"), py::arg("family") = "tpg",
      py::arg("members") = 100, py::arg("seed") = 0,
      py::arg("beta") = std::nullopt, py::arg("jobs") = 1,
      py::arg("max_epochs") = std::nullopt, py::arg("out") = std::nullopt);
  mod.def(
      "calibrate_csv",
      [](const std::string& data_path, const std::string& family, std::size_t members,
         std::uint64_t seed, std::optional<double> beta, std::size_t jobs,
         std::optional<std::size_t> max_epochs, std::optional<std::string> out) {
        const CalibrateOptions opt =
            build_options(family, members, seed, beta, jobs, max_epochs);
        return outcome_dict(calibrate_dataset(read_data_csv(data_path), opt), out);
      },
      py::arg("data"), py::arg("family") = "tpg", py::arg("members") = 100,
      py::arg("seed") = 0, py::arg("beta") = std::nullopt, py::arg("jobs") = 1,
      py::arg("max_epochs") = std::nullopt, py::arg("out") = std::nullopt);
  mod.def(
      "predict",
      [](const std::string& model_path, const std::vector<std::vector<double>>& x,
         const std::vector<double>& m) {
        if (x.size() != m.size()) {
          throw std::invalid_argument("x and m must have the same length");
        }
        const CalibrationModel model = load_model(model_path);
        py::list median, lo50, hi50, lo95, hi95;
        for (std::size_t i = 0; i < x.size(); ++i) {
          const IntervalPrediction p = predict_intervals(model, x[i], m[i]);
          median.append(p.median);
          lo50.append(p.lo50);
          hi50.append(p.hi50);
          lo95.append(p.lo95);
          hi95.append(p.hi95);
        }
        py::dict d;
        d["median"] = median;
        d["lo50"] = lo50;
        d["hi50"] = hi50;
        d["lo95"] = lo95;
        d["hi95"] = hi95;
        return d;
      },
      py::arg("model"), py::arg("x"), py::arg("m"));
  mod.def(
      "evaluate",
      [](const std::string& model_path, const std::string& data_path) {
        const CalibrationModel model = load_model(model_path);
        const Dataset data = read_data_csv(data_path);
        return metrics_dict(evaluate(model, data.records));
      },
      py::arg("model"), py::arg("data"));
}
