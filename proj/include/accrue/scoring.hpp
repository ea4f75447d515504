#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "accrue/distributions.hpp"

namespace accrue {

/// Accuracy/reliability summary of one scored partition.
struct ScorePair {
  double crps_mean = 0.0;
  double rs = 0.0;
};

/// Loss weight constrained to the open interval (0, 1).
class BetaWeight {
 public:
  explicit BetaWeight(double value);
  double value() const { return value_; }

 private:
  double value_;
};

/// Closed-form CRPS of a Gaussian error distribution with scale sigma
/// evaluated at observed error eps. Positively homogeneous of degree 1.
double gaussian_crps(double eps, double sigma);

/// Closed-form CRPS of the two-piece Gaussian (left scale sigma1, right
/// scale sigma2); continuous across eps = 0.
double tpg_crps(double eps, double sigma1, double sigma2);

/// Closed-form CRPS of the asymmetric Laplace (scale lambda, asymmetry
/// kappa); continuous at eps = 0.
double al_crps(double eps, double lambda, double kappa);

/// Family-dispatched per-pair CRPS. Gamma is rejected.
double crps(const DistributionParams& d, double eps);

/// d crps / d params at fixed eps; entries beyond the family arity are zero.
std::array<double, 2> crps_param_grad(const DistributionParams& d, double eps);

/// Mean of per-pair CRPS values; lengths must match and be nonzero.
double mean_crps(const std::vector<double>& errors,
                 const std::vector<DistributionParams>& params);

/// Reliability score of PIT values against the standard uniform:
/// the integrated squared gap between u and the empirical step CDF.
/// Input must be ascending and inside [0, 1].
double reliability_score_uniform(const std::vector<double>& u_sorted);

/// Gradient of reliability_score_uniform in the sorted coordinates:
/// d RS / d u_i = 2 u_i / N - (2i - 1) / N^2 (1-based i, same for i = N).
std::vector<double> reliability_score_uniform_grad(
    const std::vector<double>& u_sorted);

/// Reliability score in standardized-error space for the Gaussian model,
/// eta_i = eps_i / (sqrt(2) sigma_i), input ascending.
double gaussian_rs(const std::vector<double>& eta_sorted);

/// Minimum attainable gaussian_rs over placements of n points.
double gaussian_rs_min(std::size_t n);

/// PIT values u_i = cdf(params_i, errors_i) sorted ascending, with the sort
/// permutation: u_sorted[j] came from input index order[j]. Ties keep input
/// order, which fixes the subgradient used by training.
struct PitResult {
  std::vector<double> u_sorted;
  std::vector<std::size_t> order;
};

PitResult pit_transform_with_order(const std::vector<double>& errors,
                                   const std::vector<DistributionParams>& params);

std::vector<double> pit_transform(const std::vector<double>& errors,
                                  const std::vector<DistributionParams>& params);

/// The combined loss: beta * mean CRPS + (1 - beta) * RS.
double accrue_loss(const ScorePair& s, const BetaWeight& beta);

/// Gaussian-model weight heuristic: beta = RS_min / (CRPS_min + RS_min) with
/// CRPS_min floored at machine epsilon, result clipped to [0.01, 0.99].
BetaWeight gaussian_beta_heuristic(const std::vector<double>& errors);

}  // namespace accrue
