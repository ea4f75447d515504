#include "accrue/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "accrue/csv.hpp"
#include "accrue/parallel.hpp"
#include "accrue/rng.hpp"

namespace accrue {

namespace {

// Seed streams derived from the one base seed. The family is deliberately
// not mixed in: TPG and AL runs then see identical member data and splits,
// which keeps their selection losses comparable.
constexpr std::uint64_t kStreamBetaCell = 1;
constexpr std::uint64_t kStreamMemberData = 2;
constexpr std::uint64_t kStreamMemberTrain = 3;
constexpr std::uint64_t kStreamSelectionSet = 4;
constexpr std::uint64_t kStreamBetaData = 5;

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void emit(const CalibrateOptions& opt, const std::string& line) {
  if (opt.progress) opt.progress(line);
}

ScorePair score_partition(const NetworkWeights& w, Family family,
                          const Standardizer& stdz,
                          const std::vector<PairRecord>& records) {
  const std::size_t n = records.size();
  std::vector<double> errors(n);
  std::vector<DistributionParams> params(n);
  for (std::size_t i = 0; i < n; ++i) {
    errors[i] = records[i].eps();
    params[i] = forward(w, family, stdz.apply(records[i].x));
  }
  ScorePair s;
  s.crps_mean = mean_crps(errors, params);
  s.rs = reliability_score_uniform(pit_transform(errors, params));
  return s;
}

struct Quartiles {
  double q1, median, q3;
};

// Nearest-rank (lower) quartiles of a copy-sorted vector.
Quartiles loss_quartiles(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return {v[(n - 1) / 4], v[(n + 1) / 2 - 1], v[3 * (n - 1) / 4]};
}

}  // namespace

DistributionParams CalibrationModel::params_at(const std::vector<double>& x) const {
  return forward(weights, family, standardizer.apply(x));
}

const FamilyRun& CalibrationOutcome::selected_run() const {
  for (const FamilyRun& run : runs) {
    if (run.family == selected) return run;
  }
  throw std::logic_error("CalibrationOutcome: no run matches the selected family");
}

BetaSearchResult beta_search(const Dataset& data, Family family,
                             const TrainingConfig& cfg, std::uint64_t base_seed,
                             std::size_t jobs) {
  if (family == Family::Gamma) {
    throw std::invalid_argument("beta_search: Gamma is a data-generation family only");
  }
  constexpr std::size_t kCells = 9;
  BetaSearchResult result;
  result.cells.assign(kCells, BetaCell{});

  parallel_for(kCells, jobs, [&](std::size_t c) {
    const double beta_val = static_cast<double>(c + 1) / 10.0;
    try {
      const std::uint64_t cell_seed = mix_seed(base_seed, kStreamBetaCell, c);
      const Dataset split = split_dataset(data, {0.8, 0.2}, mix_seed(cell_seed, 1, 0));
      TrainingConfig cell_cfg = cfg;
      cell_cfg.seed = mix_seed(cell_seed, 2, 0);
      const BetaWeight bw(beta_val);
      const TrainResult tr = train(split, family, bw, cell_cfg);
      const ScorePair s = score_partition(tr.weights, family, tr.standardizer,
                                          split.partition(Split::Validation));
      BetaCell& cell = result.cells[c];
      cell.beta = beta_val;
      cell.crps = s.crps_mean;
      cell.rs = s.rs;
      cell.dist = std::hypot(s.crps_mean, s.rs);
    } catch (const std::exception& e) {
      throw std::runtime_error("beta_search: cell beta=" + fmt6(beta_val) +
                               " failed: " + e.what());
    }
  });

  // Ascending scan with strict improvement: ties resolve to the smaller beta.
  std::size_t best = 0;
  for (std::size_t c = 1; c < kCells; ++c) {
    if (result.cells[c].dist < result.cells[best].dist) best = c;
  }
  result.beta_star = BetaWeight(result.cells[best].beta);
  return result;
}

std::vector<CalibrationModel> train_ensemble(const MemberDataProvider& provider,
                                             Family family, const BetaWeight& beta,
                                             std::size_t n_members,
                                             const TrainingConfig& cfg,
                                             std::uint64_t base_seed,
                                             std::size_t jobs) {
  if (n_members < 1) {
    throw std::invalid_argument("train_ensemble: need at least one member");
  }
  std::vector<CalibrationModel> out(n_members);
  parallel_for(n_members, jobs, [&](std::size_t i) {
    try {
      const Dataset ds = provider(i);
      TrainingConfig member_cfg = cfg;
      member_cfg.seed = mix_seed(base_seed, kStreamMemberTrain, i);
      const TrainResult tr = train(ds, family, beta, member_cfg);
      CalibrationModel m;
      m.family = family;
      m.beta_star = beta;
      m.weights = tr.weights;
      m.standardizer = tr.standardizer;
      m.seed = member_cfg.seed;
      m.test_loss = accrue_batch_loss(tr.weights, family, beta,
                                      ds.partition(Split::Test), tr.standardizer);
      out[i] = std::move(m);
    } catch (const std::exception& e) {
      throw std::runtime_error("train_ensemble: member " + std::to_string(i) +
                               " failed: " + e.what());
    }
  });
  return out;
}

std::size_t select_median_index(const std::vector<double>& losses) {
  const std::size_t n = losses.size();
  if (n == 0) throw std::invalid_argument("select_median_index: empty input");
  std::vector<std::size_t> ord(n);
  std::iota(ord.begin(), ord.end(), std::size_t{0});
  std::stable_sort(ord.begin(), ord.end(), [&losses](std::size_t a, std::size_t b) {
    return losses[a] < losses[b];
  });
  return ord[(n + 1) / 2 - 1];  // lower median
}

CalibrationModel select_median_member(const std::vector<CalibrationModel>& models,
                                      const std::vector<double>& selection_losses) {
  if (models.empty()) {
    throw std::invalid_argument("select_median_member: empty ensemble");
  }
  if (models.size() != selection_losses.size()) {
    throw std::invalid_argument("select_median_member: loss count mismatch");
  }
  const std::size_t idx = select_median_index(selection_losses);
  CalibrationModel chosen = models[idx];
  chosen.test_loss = selection_losses[idx];
  return chosen;
}

CalibrationModel select_family(const CalibrationModel& a, const CalibrationModel& b,
                               bool* tie) {
  if (tie) *tie = false;
  if (a.test_loss < b.test_loss) return a;
  if (b.test_loss < a.test_loss) return b;
  if (tie) *tie = true;
  if (a.family == Family::AsymmetricLaplace) return a;
  if (b.family == Family::AsymmetricLaplace) return b;
  return family_name(a.family) <= family_name(b.family) ? a : b;
}

IntervalPrediction predict_intervals(const CalibrationModel& model,
                                     const std::vector<double>& x, double m) {
  const DistributionParams p = model.params_at(x);
  IntervalPrediction out;
  out.x = x;
  out.m = m;
  out.lo95 = m + quantile(p, 0.025);
  out.lo50 = m + quantile(p, 0.25);
  out.median = m + quantile(p, 0.5);
  out.hi50 = m + quantile(p, 0.75);
  out.hi95 = m + quantile(p, 0.975);
  return out;
}

MetricsReport evaluate(const CalibrationModel& model,
                       const std::vector<PairRecord>& records) {
  const std::size_t n = records.size();
  if (n == 0) throw std::invalid_argument("evaluate: empty partition");

  std::vector<double> errors(n);
  std::vector<DistributionParams> params(n);
  double abs_sum = 0.0;
  std::size_t in50 = 0, in95 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    errors[i] = records[i].eps();
    params[i] = model.params_at(records[i].x);
    abs_sum += std::fabs(errors[i]);
    const double lo95 = quantile(params[i], 0.025);
    const double lo50 = quantile(params[i], 0.25);
    const double hi50 = quantile(params[i], 0.75);
    const double hi95 = quantile(params[i], 0.975);
    if (errors[i] >= lo50 && errors[i] <= hi50) ++in50;
    if (errors[i] >= lo95 && errors[i] <= hi95) ++in95;
  }

  MetricsReport r;
  r.n = n;
  r.beta = model.beta_star.value();
  r.crps_mean = mean_crps(errors, params);
  r.rs = reliability_score_uniform(pit_transform(errors, params));
  r.accrue = accrue_loss(ScorePair{r.crps_mean, r.rs}, model.beta_star);
  r.mae = abs_sum / static_cast<double>(n);
  r.coverage50 = static_cast<double>(in50) / static_cast<double>(n);
  r.coverage95 = static_cast<double>(in95) / static_cast<double>(n);
  return r;
}

namespace {

FamilyRun run_family(Family family, const CalibrateOptions& opt,
                     const Dataset& beta_data, const MemberDataProvider& provider,
                     const std::vector<PairRecord>* shared_selection) {
  FamilyRun run;
  run.family = family;
  if (opt.beta_override) {
    run.beta.beta_star = BetaWeight(*opt.beta_override);
    run.beta_overridden = true;
    emit(opt, "beta (" + family_name(family) + "): override " +
                  fmt6(opt.beta_override.value()));
  } else {
    run.beta = beta_search(beta_data, family, opt.cfg, opt.seed, opt.jobs);
    emit(opt, "beta search (" + family_name(family) + "): beta*=" +
                  fmt6(run.beta.beta_star.value()));
  }

  const std::vector<CalibrationModel> members =
      train_ensemble(provider, family, run.beta.beta_star, opt.members, opt.cfg,
                     opt.seed, opt.jobs);
  emit(opt, "ensemble (" + family_name(family) + "): trained " +
                std::to_string(members.size()) + " members");

  run.selection_losses.resize(members.size());
  if (shared_selection) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      run.selection_losses[i] =
          accrue_batch_loss(members[i].weights, family, run.beta.beta_star,
                            *shared_selection, members[i].standardizer);
    }
  } else {
    for (std::size_t i = 0; i < members.size(); ++i) {
      run.selection_losses[i] = members[i].test_loss;
    }
  }

  run.median_index = select_median_index(run.selection_losses);
  run.median = members[run.median_index];
  run.median.test_loss = run.selection_losses[run.median_index];
  emit(opt, "median member (" + family_name(family) + "): index " +
                std::to_string(run.median_index) + ", loss " +
                fmt6(run.median.test_loss));

  if (shared_selection) {
    run.metrics = evaluate(run.median, *shared_selection);
  } else {
    run.metrics = evaluate(run.median, provider(run.median_index).partition(Split::Test));
  }
  return run;
}

CalibrationOutcome run_protocol(const CalibrateOptions& opt, const Dataset& beta_data,
                                const MemberDataProvider& provider,
                                const std::vector<PairRecord>* shared_selection) {
  if (opt.members < 1) {
    throw std::invalid_argument("calibrate: members must be at least 1");
  }
  CalibrationOutcome outcome;
  outcome.seed = opt.seed;
  if (opt.auto_family) {
    outcome.runs.push_back(run_family(Family::TwoPieceGaussian, opt, beta_data,
                                      provider, shared_selection));
    outcome.runs.push_back(run_family(Family::AsymmetricLaplace, opt, beta_data,
                                      provider, shared_selection));
    const CalibrationModel chosen = select_family(
        outcome.runs[0].median, outcome.runs[1].median, &outcome.family_tie);
    outcome.selected = chosen.family;
    emit(opt, std::string("family selection: ") + family_name(outcome.selected) +
                  (outcome.family_tie ? " (tie)" : ""));
  } else {
    if (opt.family == Family::Gamma) {
      throw std::invalid_argument("calibrate: Gamma is a data-generation family only");
    }
    outcome.runs.push_back(
        run_family(opt.family, opt, beta_data, provider, shared_selection));
    outcome.selected = opt.family;
  }
  outcome.report = format_report(outcome);
  return outcome;
}

}  // namespace

CalibrationOutcome calibrate_scenario(ScenarioId id, std::size_t n,
                                      const CalibrateOptions& opt) {
  if (n < 10) throw std::invalid_argument("calibrate_scenario: n too small");
  const std::uint64_t seed = opt.seed;
  const Dataset beta_data = generate(id, n, mix_seed(seed, kStreamBetaData, 0));
  const MemberDataProvider provider = [id, n, seed](std::size_t i) {
    const std::uint64_t data_seed = mix_seed(seed, kStreamMemberData, i);
    return split_dataset(generate(id, n, data_seed), {0.64, 0.16, 0.20},
                         mix_seed(data_seed, 1, 0));
  };
  const std::vector<PairRecord> selection =
      generate(id, 2000, mix_seed(seed, kStreamSelectionSet, 0)).records;
  return run_protocol(opt, beta_data, provider, &selection);
}

CalibrationOutcome calibrate_dataset(const Dataset& data,
                                     const CalibrateOptions& opt) {
  if (data.size() < 10) throw std::invalid_argument("calibrate_dataset: too few rows");
  const std::uint64_t seed = opt.seed;
  const MemberDataProvider provider = [&data, seed](std::size_t i) {
    return split_dataset(data, {0.64, 0.16, 0.20},
                         mix_seed(seed, kStreamMemberData, i));
  };
  return run_protocol(opt, data, provider, nullptr);
}

std::string format_metrics(const MetricsReport& m) {
  std::ostringstream out;
  out << "=== evaluation report ===\n";
  out << "n:          " << m.n << '\n';
  out << "beta:       " << fmt6(m.beta) << '\n';
  out << "crps:       " << fmt6(m.crps_mean) << '\n';
  out << "rs:         " << fmt6(m.rs) << '\n';
  out << "accrue:     " << fmt6(m.accrue) << '\n';
  out << "mae:        " << fmt6(m.mae) << '\n';
  out << "coverage50: " << fmt6(m.coverage50) << '\n';
  out << "coverage95: " << fmt6(m.coverage95) << '\n';
  out << "--- machine readable ---\n";
  out << "n=" << m.n << '\n';
  out << "beta=" << format_double(m.beta) << '\n';
  out << "crps=" << format_double(m.crps_mean) << '\n';
  out << "rs=" << format_double(m.rs) << '\n';
  out << "accrue=" << format_double(m.accrue) << '\n';
  out << "mae=" << format_double(m.mae) << '\n';
  out << "coverage50=" << format_double(m.coverage50) << '\n';
  out << "coverage95=" << format_double(m.coverage95) << '\n';
  return out.str();
}

std::string format_report(const CalibrationOutcome& outcome) {
  std::ostringstream out;
  out << "=== calibration report ===\n";
  out << "mode: " << (outcome.runs.size() > 1 ? "auto-family" : "single-family")
      << '\n';
  out << "base seed: " << outcome.seed << '\n';
  if (outcome.runs.size() > 1) {
    out << "family comparison (median member losses):\n";
    for (const FamilyRun& run : outcome.runs) {
      out << "  " << family_name(run.family) << "  "
          << fmt6(run.median.test_loss) << '\n';
    }
    out << "selected family: " << family_name(outcome.selected)
        << (outcome.family_tie ? " (tie)" : "") << '\n';
  }

  for (const FamilyRun& run : outcome.runs) {
    out << "--- family " << family_name(run.family) << " ---\n";
    if (run.beta_overridden) {
      out << "beta selection: override\n";
    } else {
      out << "beta selection: grid search\n";
      out << "  beta  crps          rs            dist\n";
      for (const BetaCell& cell : run.beta.cells) {
        out << "  " << fmt6(cell.beta) << "   " << fmt6(cell.crps) << "   "
            << fmt6(cell.rs) << "   " << fmt6(cell.dist) << '\n';
      }
    }
    out << "beta_star: " << fmt6(run.beta.beta_star.value()) << '\n';
    out << "members: " << run.selection_losses.size() << '\n';
    const Quartiles q = loss_quartiles(run.selection_losses);
    out << "member loss quartiles: q1=" << fmt6(q.q1) << " median=" << fmt6(q.median)
        << " q3=" << fmt6(q.q3) << '\n';
    out << "median member: index " << run.median_index << ", train seed "
        << run.median.seed << '\n';
    const MetricsReport& m = run.metrics;
    out << "test metrics (n=" << m.n << "):\n";
    out << "  crps:       " << fmt6(m.crps_mean) << '\n';
    out << "  rs:         " << fmt6(m.rs) << '\n';
    out << "  accrue:     " << fmt6(m.accrue) << '\n';
    out << "  mae:        " << fmt6(m.mae) << '\n';
    out << "  coverage50: " << fmt6(m.coverage50) << '\n';
    out << "  coverage95: " << fmt6(m.coverage95) << '\n';
  }

  out << "--- machine readable ---\n";
  out << "selected_family=" << family_name(outcome.selected) << '\n';
  out << "family_tie=" << (outcome.family_tie ? 1 : 0) << '\n';
  out << "seed=" << outcome.seed << '\n';
  const FamilyRun& sel = outcome.selected_run();
  out << "members=" << sel.selection_losses.size() << '\n';
  out << "beta_star=" << format_double(sel.beta.beta_star.value()) << '\n';
  out << "test.n=" << sel.metrics.n << '\n';
  out << "test.crps=" << format_double(sel.metrics.crps_mean) << '\n';
  out << "test.rs=" << format_double(sel.metrics.rs) << '\n';
  out << "test.accrue=" << format_double(sel.metrics.accrue) << '\n';
  out << "test.mae=" << format_double(sel.metrics.mae) << '\n';
  out << "test.coverage50=" << format_double(sel.metrics.coverage50) << '\n';
  out << "test.coverage95=" << format_double(sel.metrics.coverage95) << '\n';

  for (const FamilyRun& run : outcome.runs) {
    const std::string p = family_name(run.family) + ".";
    out << p << "beta_source=" << (run.beta_overridden ? "override" : "grid") << '\n';
    out << p << "beta_star=" << format_double(run.beta.beta_star.value()) << '\n';
    if (!run.beta_overridden) {
      for (std::size_t c = 0; c < run.beta.cells.size(); ++c) {
        const BetaCell& cell = run.beta.cells[c];
        const std::string g = p + "grid." + std::to_string(c + 1) + ".";
        out << g << "beta=" << format_double(cell.beta) << '\n';
        out << g << "crps=" << format_double(cell.crps) << '\n';
        out << g << "rs=" << format_double(cell.rs) << '\n';
        out << g << "dist=" << format_double(cell.dist) << '\n';
      }
    }
    const Quartiles q = loss_quartiles(run.selection_losses);
    out << p << "member_loss.q1=" << format_double(q.q1) << '\n';
    out << p << "member_loss.median=" << format_double(q.median) << '\n';
    out << p << "member_loss.q3=" << format_double(q.q3) << '\n';
    out << p << "median_member.index=" << run.median_index << '\n';
    out << p << "median_member.train_seed=" << run.median.seed << '\n';
    out << p << "median_member.loss=" << format_double(run.median.test_loss) << '\n';
    out << p << "test.crps=" << format_double(run.metrics.crps_mean) << '\n';
    out << p << "test.rs=" << format_double(run.metrics.rs) << '\n';
    out << p << "test.accrue=" << format_double(run.metrics.accrue) << '\n';
    out << p << "test.mae=" << format_double(run.metrics.mae) << '\n';
    out << p << "test.coverage50=" << format_double(run.metrics.coverage50) << '\n';
    out << p << "test.coverage95=" << format_double(run.metrics.coverage95) << '\n';
  }
  return out.str();
}

}  // namespace accrue
