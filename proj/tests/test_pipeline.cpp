#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "accrue/pipeline.hpp"
#include "accrue/synthetic.hpp"

using namespace accrue;

namespace {

TrainingConfig quick_cfg() {
  TrainingConfig cfg;
  cfg.max_epochs = 25;
  cfg.patience = 8;
  return cfg;
}

CalibrationModel zero_model(Family family, double beta) {
  CalibrationModel m;
  m.family = family;
  m.beta_star = BetaWeight(beta);
  m.weights.d_in = 1;
  m.weights.n_out = family_arity(family);
  m.weights.w1.assign(10, 0.0);
  m.weights.b1.assign(10, 0.0);
  m.weights.w2.assign(static_cast<std::size_t>(m.weights.n_out) * 10, 0.0);
  m.weights.b2.assign(static_cast<std::size_t>(m.weights.n_out), 0.0);
  m.standardizer = Standardizer::identity(1);
  return m;
}

double parse_machine_value(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + "=", 0) == 0) {
      return std::stod(line.substr(key.size() + 1));
    }
  }
  throw std::runtime_error("key not found in report: " + key);
}

}  // namespace

TEST_CASE("beta_search picks a grid member minimizing the score norm") {
  const Dataset data = generate(ScenarioId::A, 600, 40);
  const auto res = beta_search(data, Family::TwoPieceGaussian, quick_cfg(), 7);
  REQUIRE(res.cells.size() == 9);
  double best = 1e300;
  for (std::size_t c = 0; c < 9; ++c) {
    CHECK(res.cells[c].beta ==
          doctest::Approx((static_cast<double>(c) + 1.0) / 10.0).epsilon(1e-15));
    CHECK(res.cells[c].dist ==
          doctest::Approx(std::hypot(res.cells[c].crps, res.cells[c].rs)).epsilon(1e-15));
    best = std::min(best, res.cells[c].dist);
  }
  // The winner is a grid value and carries the minimal distance.
  const auto& winner = *std::find_if(res.cells.begin(), res.cells.end(), [&](const BetaCell& c) {
    return c.beta == res.beta_star.value();
  });
  CHECK(winner.dist == best);
  // First strict minimum wins: no earlier cell is as small.
  for (const auto& c : res.cells) {
    if (c.beta < res.beta_star.value()) CHECK(c.dist > best);
  }
}

TEST_CASE("beta_search is reproducible") {
  const Dataset data = generate(ScenarioId::D, 500, 41);
  const auto a = beta_search(data, Family::AsymmetricLaplace, quick_cfg(), 11);
  const auto b = beta_search(data, Family::AsymmetricLaplace, quick_cfg(), 11);
  CHECK(a.beta_star.value() == b.beta_star.value());
  for (std::size_t c = 0; c < 9; ++c) {
    CHECK(a.cells[c].crps == b.cells[c].crps);
    CHECK(a.cells[c].rs == b.cells[c].rs);
  }
  // Threaded execution returns member-keyed results, identical to serial.
  const auto par = beta_search(data, Family::AsymmetricLaplace, quick_cfg(), 11, 4);
  CHECK(par.beta_star.value() == a.beta_star.value());
  for (std::size_t c = 0; c < 9; ++c) {
    CHECK(par.cells[c].crps == a.cells[c].crps);
  }
}

TEST_CASE("train_ensemble derives distinct member seeds and is order-stable") {
  const Dataset base = generate(ScenarioId::A, 300, 50);
  const auto provider = [&base](std::size_t i) {
    Dataset d = base;
    d = split_dataset(d, {0.64, 0.16, 0.20}, 1000 + i);
    return d;
  };
  const auto models = train_ensemble(provider, Family::TwoPieceGaussian,
                                     BetaWeight(0.5), 4, quick_cfg(), 77);
  REQUIRE(models.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(models[i].family == Family::TwoPieceGaussian);
    CHECK(models[i].beta_star.value() == 0.5);
    CHECK(std::isfinite(models[i].test_loss));
    for (std::size_t j = i + 1; j < 4; ++j) {
      CHECK(models[i].seed != models[j].seed);
      CHECK(models[i].weights.w1 != models[j].weights.w1);
    }
  }
  // Parallel run reproduces the serial ensemble member by member.
  const auto par = train_ensemble(provider, Family::TwoPieceGaussian,
                                  BetaWeight(0.5), 4, quick_cfg(), 77, 3);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(par[i].seed == models[i].seed);
    CHECK(par[i].weights.w1 == models[i].weights.w1);
    CHECK(par[i].test_loss == models[i].test_loss);
  }
}

TEST_CASE("select_median_index returns the lower median position") {
  CHECK(select_median_index({5.0}) == 0);
  CHECK(select_median_index({3.0, 1.0, 2.0}) == 2);        // sorted: 1,2,3 -> 2
  CHECK(select_median_index({4.0, 1.0, 3.0, 2.0}) == 3);   // lower median 2
  CHECK(select_median_index({2.0, 2.0, 2.0}) == 1);        // stable tie order
  CHECK_THROWS_AS(select_median_index({}), std::invalid_argument);
}

TEST_CASE("select_median_member swaps in the selection loss") {
  std::vector<CalibrationModel> models;
  for (int i = 0; i < 3; ++i) {
    CalibrationModel m = zero_model(Family::TwoPieceGaussian, 0.5);
    m.seed = static_cast<std::uint64_t>(i);
    m.test_loss = 100.0 + i;
    models.push_back(m);
  }
  const std::vector<double> sel{0.9, 0.2, 0.5};
  const auto median = select_median_member(models, sel);
  CHECK(median.seed == 2);       // member with loss 0.5
  CHECK(median.test_loss == 0.5);
  CHECK_THROWS_AS(select_median_member(models, {0.1}), std::invalid_argument);
}

TEST_CASE("select_family keeps the smaller loss and breaks ties toward AL") {
  CalibrationModel tpg = zero_model(Family::TwoPieceGaussian, 0.5);
  CalibrationModel al = zero_model(Family::AsymmetricLaplace, 0.5);
  tpg.test_loss = 0.219;
  al.test_loss = 0.215;
  bool tie = true;
  CHECK(select_family(tpg, al, &tie).family == Family::AsymmetricLaplace);
  CHECK_FALSE(tie);
  CHECK(select_family(al, tpg).family == Family::AsymmetricLaplace);
  tpg.test_loss = 0.1;
  CHECK(select_family(tpg, al, &tie).family == Family::TwoPieceGaussian);
  CHECK_FALSE(tie);
  al.test_loss = 0.1;
  CHECK(select_family(tpg, al, &tie).family == Family::AsymmetricLaplace);
  CHECK(tie);
  CHECK(select_family(al, tpg, &tie).family == Family::AsymmetricLaplace);
  CHECK(tie);
}

TEST_CASE("predict_intervals reflects the model's error distribution") {
  // Unit symmetric two-piece: median at m, symmetric quartiles.
  const CalibrationModel sym = zero_model(Family::TwoPieceGaussian, 0.5);
  const auto p = predict_intervals(sym, {0.4}, 5.0);
  CHECK(p.median == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(p.hi50 - 5.0 == doctest::Approx(5.0 - p.lo50).epsilon(1e-10));
  CHECK(p.hi95 - 5.0 == doctest::Approx(5.0 - p.lo95).epsilon(1e-10));
  CHECK(p.lo95 < p.lo50);
  CHECK(p.lo50 < p.median);
  CHECK(p.median < p.hi50);
  CHECK(p.hi50 < p.hi95);
  CHECK(p.hi95 - 5.0 == doctest::Approx(quantile(tpg_params(1.0, 1.0), 0.975)).epsilon(1e-12));

  // Left-skewed asymmetric Laplace (kappa > 1): more mass below m.
  CalibrationModel skew = zero_model(Family::AsymmetricLaplace, 0.5);
  skew.weights.b2 = {0.0, std::log(3.0)};  // lambda 1, kappa 3
  const auto q = predict_intervals(skew, {0.4}, 0.0);
  CHECK(q.median < 0.0);
  CHECK(0.0 - q.lo95 > q.hi95 - 0.0);
}

TEST_CASE("evaluate reports exact blend identity and sane coverage") {
  const CalibrationModel m = zero_model(Family::TwoPieceGaussian, 0.7);
  // Records drawn from the model's own unit distribution.
  Rng rng(99);
  std::vector<PairRecord> recs(2000);
  const DistributionParams unit = tpg_params(1.0, 1.0);
  for (auto& r : recs) {
    r.x = {rng.uniform01()};
    r.m = 3.0;
    r.y = 3.0 + sample(unit, rng);
  }
  const MetricsReport rep = evaluate(m, recs);
  CHECK(rep.n == 2000);
  CHECK(rep.beta == 0.7);
  CHECK(rep.accrue == 0.7 * rep.crps_mean + (1.0 - 0.7) * rep.rs);
  CHECK(rep.coverage50 == doctest::Approx(0.50).epsilon(0.06));
  CHECK(rep.coverage95 == doctest::Approx(0.95).epsilon(0.03));
  CHECK(rep.rs < 0.005);

  // MAE is the mean absolute error of the point prediction.
  std::vector<PairRecord> exact(5);
  for (std::size_t i = 0; i < 5; ++i) {
    exact[i].x = {0.1};
    exact[i].m = 2.0;
    exact[i].y = 2.0;
  }
  CHECK(evaluate(m, exact).mae == 0.0);
  CHECK_THROWS_AS(evaluate(m, {}), std::invalid_argument);
}

TEST_CASE("calibrate_scenario runs the full protocol deterministically") {
  CalibrateOptions opt;
  opt.auto_family = false;
  opt.family = Family::TwoPieceGaussian;
  opt.members = 3;
  opt.seed = 2025;
  opt.cfg = quick_cfg();
  const auto a = calibrate_scenario(ScenarioId::A, 400, opt);
  const auto b = calibrate_scenario(ScenarioId::A, 400, opt);
  CHECK(a.report == b.report);
  REQUIRE(a.runs.size() == 1);
  const auto& run = a.selected_run();
  CHECK(run.family == Family::TwoPieceGaussian);
  REQUIRE(run.selection_losses.size() == 3);
  CHECK(run.median.weights.w1 == b.selected_run().median.weights.w1);
  // The median member's selection loss sits between the extremes.
  const double lo = *std::min_element(run.selection_losses.begin(),
                                      run.selection_losses.end());
  const double hi = *std::max_element(run.selection_losses.begin(),
                                      run.selection_losses.end());
  CHECK(run.median.test_loss >= lo);
  CHECK(run.median.test_loss <= hi);
  // Grid membership of the chosen weight.
  bool on_grid = false;
  for (int c = 1; c <= 9; ++c) {
    if (run.beta.beta_star.value() == static_cast<double>(c) / 10.0) on_grid = true;
  }
  CHECK(on_grid);
  CHECK(a.seed == 2025);
}

TEST_CASE("calibrate_scenario beta override skips the search") {
  CalibrateOptions opt;
  opt.family = Family::AsymmetricLaplace;
  opt.members = 2;
  opt.seed = 1;
  opt.cfg = quick_cfg();
  opt.beta_override = 0.35;
  const auto out = calibrate_scenario(ScenarioId::D, 300, opt);
  const auto& run = out.selected_run();
  CHECK(run.beta_overridden);
  CHECK(run.beta.beta_star.value() == 0.35);
  CHECK(run.beta.cells.empty());
  CHECK(run.metrics.beta == 0.35);
}

TEST_CASE("calibrate_scenario auto mode compares the two families") {
  CalibrateOptions opt;
  opt.auto_family = true;
  opt.members = 2;
  opt.seed = 9;
  opt.cfg = quick_cfg();
  const auto out = calibrate_scenario(ScenarioId::A, 300, opt);
  REQUIRE(out.runs.size() == 2);
  CHECK(out.runs[0].family == Family::TwoPieceGaussian);
  CHECK(out.runs[1].family == Family::AsymmetricLaplace);
  const double tpg_loss = out.runs[0].median.test_loss;
  const double al_loss = out.runs[1].median.test_loss;
  if (out.selected == Family::TwoPieceGaussian) {
    CHECK(tpg_loss < al_loss);
  } else {
    CHECK(al_loss <= tpg_loss);
  }
  CHECK(out.selected_run().family == out.selected);
}

TEST_CASE("calibrate_dataset works from fixed records and rejects tiny input") {
  Dataset data = generate(ScenarioId::A, 320, 77);
  CalibrateOptions opt;
  opt.family = Family::TwoPieceGaussian;
  opt.members = 2;
  opt.seed = 5;
  opt.cfg = quick_cfg();
  const auto out = calibrate_dataset(data, opt);
  const auto& run = out.selected_run();
  REQUIRE(run.selection_losses.size() == 2);
  // CSV mode selects on each member's own test partition.
  CHECK((run.median.test_loss == run.selection_losses[0] ||
         run.median.test_loss == run.selection_losses[1]));

  Dataset tiny = generate(ScenarioId::A, 5, 1);
  CHECK_THROWS_AS(calibrate_dataset(tiny, opt), std::invalid_argument);
  CalibrateOptions bad = opt;
  bad.family = Family::Gamma;
  CHECK_THROWS_AS(calibrate_dataset(data, bad), std::invalid_argument);
  CalibrateOptions none = opt;
  none.members = 0;
  CHECK_THROWS_AS(calibrate_dataset(data, none), std::invalid_argument);
}

TEST_CASE("report carries a machine-readable section consistent with the run") {
  CalibrateOptions opt;
  opt.family = Family::TwoPieceGaussian;
  opt.members = 3;
  opt.seed = 31;
  opt.cfg = quick_cfg();
  const auto out = calibrate_scenario(ScenarioId::C, 350, opt);
  const auto& run = out.selected_run();
  const std::string& rep = out.report;

  CHECK(rep.find("--- machine readable ---") != std::string::npos);
  CHECK(parse_machine_value(rep, "seed") == 31.0);
  CHECK(parse_machine_value(rep, "members") == 3.0);
  CHECK(parse_machine_value(rep, "beta_star") == run.beta.beta_star.value());
  CHECK(parse_machine_value(rep, "test.crps") == run.metrics.crps_mean);
  CHECK(parse_machine_value(rep, "test.rs") == run.metrics.rs);
  CHECK(parse_machine_value(rep, "test.accrue") == run.metrics.accrue);
  CHECK(parse_machine_value(rep, "test.coverage95") == run.metrics.coverage95);
  // The blend identity survives the 17-digit round trip exactly.
  const double beta = parse_machine_value(rep, "beta_star");
  CHECK(parse_machine_value(rep, "test.accrue") ==
        beta * parse_machine_value(rep, "test.crps") +
            (1.0 - beta) * parse_machine_value(rep, "test.rs"));
  // Per-family sections carry the grid and quartiles.
  CHECK(parse_machine_value(rep, "tpg.grid.1.beta") == 0.1);
  CHECK(parse_machine_value(rep, "tpg.grid.9.beta") == 0.9);
  CHECK(parse_machine_value(rep, "tpg.median_member.loss") == run.median.test_loss);
  const double q1 = parse_machine_value(rep, "tpg.member_loss.q1");
  const double q3 = parse_machine_value(rep, "tpg.member_loss.q3");
  CHECK(q1 <= parse_machine_value(rep, "tpg.member_loss.median"));
  CHECK(parse_machine_value(rep, "tpg.member_loss.median") <= q3);
}

TEST_CASE("format_metrics emits both sections") {
  MetricsReport m;
  m.crps_mean = 0.5;
  m.rs = 0.25;
  m.beta = 0.8;
  m.accrue = 0.8 * 0.5 + 0.2 * 0.25;
  m.mae = 0.4;
  m.coverage50 = 0.51;
  m.coverage95 = 0.94;
  m.n = 123;
  const std::string text = format_metrics(m);
  CHECK(text.find("--- machine readable ---") != std::string::npos);
  CHECK(parse_machine_value(text, "n") == 123.0);
  CHECK(parse_machine_value(text, "crps") == 0.5);
  CHECK(parse_machine_value(text, "accrue") == m.accrue);
}
