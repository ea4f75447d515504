#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "accrue/dataset.hpp"
#include "accrue/distributions.hpp"
#include "accrue/rng.hpp"
#include "accrue/scoring.hpp"

namespace accrue {

/// One-hidden-layer perceptron mapping a standardized input to the
/// pre-exponential parameter vector. Matrices are row-major.
struct NetworkWeights {
  int d_in = 1;
  int n_hidden = 10;
  int n_out = 1;
  std::vector<double> w1;  // n_hidden x d_in
  std::vector<double> b1;  // n_hidden
  std::vector<double> w2;  // n_out x n_hidden
  std::vector<double> b2;  // n_out

  std::size_t parameter_count() const {
    return w1.size() + b1.size() + w2.size() + b2.size();
  }
};

struct TrainingConfig {
  double learning_rate = 0.005;
  std::size_t batch_size = 100;
  std::size_t max_epochs = 1000;
  std::size_t patience = 10;
  double leaky_slope = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
};

/// Per-feature affine input scaling fitted on the training partition and
/// stored with the model. Stddev entries are floored at 1e-8.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stdev;

  static Standardizer identity(std::size_t d);
  std::vector<double> apply(const std::vector<double>& x) const;
};

Standardizer fit_standardizer(const std::vector<PairRecord>& records);

/// Fan-scaled uniform init on +-sqrt(6 / (fan_in + fan_out)), biases zero.
/// Weights are fan-scaled uniform; first-layer biases are uniform on
/// +-1/sqrt(d_in) so the hidden ReLU kinks start spread across the
/// standardized input range; output biases are zero. Draw order: w1
/// row-major, then b1, then w2 row-major.
NetworkWeights init_weights(int d_in, int n_out, Rng& rng);

/// theta = exp(clamp(leakyReLU(W2 relu(W1 x + b1) + b2), +-20)), interpreted
/// as the family's parameter vector. The asymmetric-Laplace scale slot is
/// emitted as its reciprocal (the head learns 1/lambda, which is order-one
/// for typical error scales and so stays on the unit-slope branch of the
/// output activation); other slots map one-to-one onto native parameters.
/// Every component lands in [e^-20, e^20].
DistributionParams forward(const NetworkWeights& w, Family family,
                           const std::vector<double>& x_std,
                           double leaky_slope = 0.01);

/// Combined loss of one batch (raw inputs; the standardizer is applied
/// inside): beta * mean CRPS + (1 - beta) * RS of the batch PIT values.
/// Batch must hold at least 2 records.
double accrue_batch_loss(const NetworkWeights& w, Family family,
                         const BetaWeight& beta,
                         const std::vector<PairRecord>& batch,
                         const Standardizer& stdz, double leaky_slope = 0.01);

/// Exact reverse-mode gradient of accrue_batch_loss with the PIT sort
/// permutation held fixed (subgradient through sorting).
NetworkWeights accrue_gradient(const NetworkWeights& w, Family family,
                               const BetaWeight& beta,
                               const std::vector<PairRecord>& batch,
                               const Standardizer& stdz,
                               double leaky_slope = 0.01);

struct TrainResult {
  NetworkWeights weights;       // snapshot with the best validation loss
  Standardizer standardizer;
  std::vector<double> history;  // full-validation loss after each epoch
  double best_loss = 0.0;
  std::size_t best_epoch = 0;   // 0-based index into history
};

/// Adam over shuffled mini-batches; stops at max_epochs or once `patience`
/// consecutive epochs each fail to improve (by more than 1e-12) on the
/// previous epoch's validation loss. Returns the weights from the epoch
/// with the lowest validation loss. Deterministic given cfg.seed. Throws
/// on non-finite losses. `data` must carry Train and Validation labels.
TrainResult train(const Dataset& data, Family family, const BetaWeight& beta,
                  const TrainingConfig& cfg);

}  // namespace accrue
