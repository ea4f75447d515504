#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "accrue/dataset.hpp"
#include "accrue/distributions.hpp"
#include "accrue/neural.hpp"
#include "accrue/scoring.hpp"
#include "accrue/synthetic.hpp"

namespace accrue {

/// A trained calibration: family, loss weight, network, input scaling, the
/// member's training seed, and its held-out test loss.
struct CalibrationModel {
  Family family = Family::Gaussian;
  BetaWeight beta_star = BetaWeight(0.5);
  NetworkWeights weights;
  Standardizer standardizer;
  std::uint64_t seed = 0;
  double test_loss = 0.0;

  DistributionParams params_at(const std::vector<double>& x) const;
};

/// Central intervals around the prediction; lo95 <= lo50 <= median <= hi50
/// <= hi95 by construction.
struct IntervalPrediction {
  std::vector<double> x;
  double m = 0.0;
  double median = 0.0;
  double lo50 = 0.0;
  double hi50 = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
};

struct MetricsReport {
  double crps_mean = 0.0;
  double rs = 0.0;
  double accrue = 0.0;  // beta * crps_mean + (1 - beta) * rs, same doubles
  double mae = 0.0;
  double coverage50 = 0.0;
  double coverage95 = 0.0;
  double beta = 0.0;
  std::size_t n = 0;
};

/// One grid cell of the beta search: held-out scores and their Euclidean
/// norm.
struct BetaCell {
  double beta = 0.0;
  double crps = 0.0;
  double rs = 0.0;
  double dist = 0.0;
};

struct BetaSearchResult {
  BetaWeight beta_star = BetaWeight(0.5);
  std::vector<BetaCell> cells;  // ascending beta, 0.1 through 0.9
};

/// Grid search over beta in {0.1, ..., 0.9}: each cell splits `data` 80/20
/// with its own derived seed, trains one network, scores mean CRPS and RS on
/// the validation partition, and the cell minimizing sqrt(crps^2 + rs^2)
/// wins; ties go to the smaller beta. Cell failures are reported with the
/// offending beta.
BetaSearchResult beta_search(const Dataset& data, Family family,
                             const TrainingConfig& cfg, std::uint64_t base_seed,
                             std::size_t jobs = 1);

/// Supplies member i with its (already split) dataset. Synthetic mode
/// generates fresh pairs per member; CSV mode re-splits the fixed records.
using MemberDataProvider = std::function<Dataset(std::size_t)>;

/// Trains n_members independent networks. Member i trains with seed
/// mix(base_seed, 3, i) on provider(i) and records the ACCRUE loss of its
/// own test partition. Results are keyed by member index, so any `jobs`
/// level yields identical output.
std::vector<CalibrationModel> train_ensemble(const MemberDataProvider& provider,
                                             Family family, const BetaWeight& beta,
                                             std::size_t n_members,
                                             const TrainingConfig& cfg,
                                             std::uint64_t base_seed,
                                             std::size_t jobs = 1);

/// Index of the lower-median loss: position ceil(n/2) - 1 after sorting.
std::size_t select_median_index(const std::vector<double>& losses);

/// The member whose selection loss is the (lower) median; its test_loss is
/// replaced by that selection loss.
CalibrationModel select_median_member(const std::vector<CalibrationModel>& models,
                                      const std::vector<double>& selection_losses);

/// The model with the smaller test loss; an exact tie selects the asymmetric
/// Laplace. Symmetric in its arguments.
CalibrationModel select_family(const CalibrationModel& a, const CalibrationModel& b,
                               bool* tie = nullptr);

/// Central 50%/95% intervals at one input.
IntervalPrediction predict_intervals(const CalibrationModel& model,
                                     const std::vector<double>& x, double m);

/// Scores a partition with the model: mean CRPS, RS of the full PIT vector,
/// ACCRUE at beta_star, MAE of m vs y, and closed-interval coverage of the
/// predicted 50% and 95% CIs.
MetricsReport evaluate(const CalibrationModel& model,
                       const std::vector<PairRecord>& records);

/// Everything one family's protocol produced, for reporting.
struct FamilyRun {
  Family family = Family::Gaussian;
  BetaSearchResult beta;
  bool beta_overridden = false;
  std::vector<double> selection_losses;  // by member index
  std::size_t median_index = 0;
  CalibrationModel median;
  MetricsReport metrics;
};

struct CalibrationOutcome {
  std::vector<FamilyRun> runs;  // one entry, or TPG and AL for auto
  Family selected = Family::Gaussian;
  bool family_tie = false;
  std::uint64_t seed = 0;
  std::string report;

  const FamilyRun& selected_run() const;
};

struct CalibrateOptions {
  bool auto_family = false;          // compare TPG and AL, keep the min loss
  Family family = Family::TwoPieceGaussian;
  std::size_t members = 100;
  std::uint64_t seed = 0;
  std::optional<double> beta_override;
  std::size_t jobs = 1;
  TrainingConfig cfg;                // cfg.seed is ignored; seeds are derived
  std::function<void(const std::string&)> progress;  // optional line sink
};

/// Full protocol on scenario data: every member trains on freshly generated
/// pairs, and one shared fresh 2000-pair set drives median selection and the
/// reported metrics.
CalibrationOutcome calibrate_scenario(ScenarioId id, std::size_t n,
                                      const CalibrateOptions& opt);

/// Full protocol on fixed records: beta search on the whole set, fresh
/// 64/16/20 splits per member, median selection by each member's own test
/// partition, metrics from the median member's test partition.
CalibrationOutcome calibrate_dataset(const Dataset& data,
                                     const CalibrateOptions& opt);

/// The calibrate/evaluate report text: aligned tables plus key=value lines.
std::string format_report(const CalibrationOutcome& outcome);
std::string format_metrics(const MetricsReport& metrics);

}  // namespace accrue
