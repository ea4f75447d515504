// accrue-calib: generate synthetic calibration data, fit uncertainty models,
// and emit interval predictions and verification metrics.
//
// Progress lines and calibration reports go to standard error; data
// artifacts go to files or standard output, so pipelines stay clean.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "accrue/csv.hpp"
#include "accrue/model_io.hpp"
#include "accrue/pipeline.hpp"
#include "accrue/synthetic.hpp"

namespace {

std::size_t default_jobs() {
  if (const char* env = std::getenv("ACCRUE_CALIB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_predictions(std::ostream& out,
                       const std::vector<accrue::IntervalPrediction>& preds) {
  const std::size_t d = preds.empty() ? 0 : preds[0].x.size();
  for (std::size_t i = 0; i < d; ++i) out << "x_" << (i + 1) << ',';
  out << "m,median,lo50,hi50,lo95,hi95\n";
  for (const accrue::IntervalPrediction& p : preds) {
    for (double xi : p.x) out << accrue::format_double(xi) << ',';
    out << accrue::format_double(p.m) << ',' << accrue::format_double(p.median)
        << ',' << accrue::format_double(p.lo50) << ','
        << accrue::format_double(p.hi50) << ',' << accrue::format_double(p.lo95)
        << ',' << accrue::format_double(p.hi95) << '\n';
  }
  if (!out) throw std::runtime_error("prediction write failed");
}

int run(int argc, char** argv) {
  CLI::App app{"uncertainty calibration for deterministic point predictions"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic scenario dataset");
  std::string gen_scenario;
  std::size_t gen_n = 10000;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--scenario", gen_scenario,
                  "scenario name: A, B, C, D, E, F, or GammaMisspec")
      ->required();
  gen->add_option("--n", gen_n, "number of pairs")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output CSV path (default: stdout)");

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "fit an uncertainty model to a CSV");
  std::string cal_data, cal_family = "auto", cal_out, cal_report;
  std::uint64_t cal_seed = 0;
  std::size_t cal_members = 100;
  std::size_t cal_jobs = default_jobs();
  std::optional<double> cal_beta;
  cal->add_option("--data", cal_data, "input data CSV")->required();
  cal->add_option("--family", cal_family, "gaussian, tpg, al, or auto")
      ->check(CLI::IsMember({"gaussian", "tpg", "al", "auto"}));
  cal->add_option("--seed", cal_seed, "base seed for the whole protocol");
  cal->add_option("--members", cal_members, "ensemble size")
      ->check(CLI::PositiveNumber);
  cal->add_option("--beta", cal_beta,
                  "skip the grid search and use this weight in (0,1)");
  cal->add_option("--jobs", cal_jobs,
                  "parallel training tasks (env ACCRUE_CALIB_THREADS)")
      ->check(CLI::PositiveNumber);
  cal->add_option("--out", cal_out, "output model path")->required();
  cal->add_option("--report", cal_report, "also write the report to this path");

  // predict
  auto* pre = app.add_subcommand("predict", "emit interval predictions for a CSV");
  std::string pre_model, pre_data, pre_out;
  pre->add_option("--model", pre_model, "model file")->required();
  pre->add_option("--data", pre_data, "input data CSV")->required();
  pre->add_option("--out", pre_out, "output CSV path (default: stdout)");

  // evaluate
  auto* eva = app.add_subcommand("evaluate", "score a model against a CSV");
  std::string eva_model, eva_data;
  eva->add_option("--model", eva_model, "model file")->required();
  eva->add_option("--data", eva_data, "input data CSV")->required();

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    const accrue::Dataset data =
        accrue::generate(accrue::scenario_from_name(gen_scenario), gen_n, gen_seed);
    if (gen_out.empty()) {
      accrue::write_data_csv(std::cout, data);
    } else {
      accrue::write_data_csv(gen_out, data);
      std::cerr << "wrote " << data.size() << " rows to " << gen_out << '\n';
    }
    return 0;
  }

  if (cal->parsed()) {
    const accrue::Dataset data = accrue::read_data_csv(cal_data);
    accrue::CalibrateOptions opt;
    opt.auto_family = cal_family == "auto";
    if (!opt.auto_family) opt.family = accrue::family_from_name(cal_family);
    opt.members = cal_members;
    opt.seed = cal_seed;
    opt.jobs = cal_jobs;
    opt.beta_override = cal_beta;
    opt.progress = [](const std::string& line) { std::cerr << line << '\n'; };
    if (cal_members == 1) {
      std::cerr << "warning: --members 1 disables ensembling; the single member "
                   "is used as-is\n";
    }
    const accrue::CalibrationOutcome outcome = accrue::calibrate_dataset(data, opt);
    accrue::save_model(cal_out, outcome.selected_run().median);
    std::cerr << outcome.report;
    if (!cal_report.empty()) write_text_file(cal_report, outcome.report);
    std::cerr << "wrote model to " << cal_out << '\n';
    return 0;
  }

  if (pre->parsed()) {
    const accrue::CalibrationModel model = accrue::load_model(pre_model);
    const accrue::Dataset data = accrue::read_data_csv(pre_data);
    if (data.dim() != static_cast<std::size_t>(model.weights.d_in)) {
      throw std::runtime_error("predict: model expects " +
                               std::to_string(model.weights.d_in) +
                               " inputs, data has " + std::to_string(data.dim()));
    }
    std::vector<accrue::IntervalPrediction> preds;
    preds.reserve(data.size());
    for (const accrue::PairRecord& rec : data.records) {
      preds.push_back(accrue::predict_intervals(model, rec.x, rec.m));
    }
    if (pre_out.empty()) {
      write_predictions(std::cout, preds);
    } else {
      std::ofstream out(pre_out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open '" + pre_out + "' for writing");
      write_predictions(out, preds);
      std::cerr << "wrote " << preds.size() << " predictions to " << pre_out << '\n';
    }
    return 0;
  }

  if (eva->parsed()) {
    const accrue::CalibrationModel model = accrue::load_model(eva_model);
    const accrue::Dataset data = accrue::read_data_csv(eva_data);
    if (data.dim() != static_cast<std::size_t>(model.weights.d_in)) {
      throw std::runtime_error("evaluate: model expects " +
                               std::to_string(model.weights.d_in) +
                               " inputs, data has " + std::to_string(data.dim()));
    }
    const accrue::MetricsReport metrics = accrue::evaluate(model, data.records);
    std::cout << accrue::format_metrics(metrics);
    return 0;
  }

  return 1;  // unreachable: a subcommand is required
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
