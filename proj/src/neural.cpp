#include "accrue/neural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace accrue {

namespace {

// Pre-exponential outputs are clamped here, so parameters stay inside
// [e^-20, e^20].
constexpr double kOutClamp = 20.0;

// The asymmetric-Laplace scale slot is emitted as a reciprocal: the network
// output parameterizes 1/lambda, so lambda = exp(-t). The error scale 1/lambda
// is order-one for typical data, which keeps that head's pre-activations on
// the unit-slope branch of the output leakyReLU; parameterizing lambda
// directly would push them deep into the 0.01-slope branch and make the
// scale head train two orders of magnitude slower. Other families use their
// native parameters.
inline double output_sign(Family family, std::size_t slot) {
  return (family == Family::AsymmetricLaplace && slot == 0) ? -1.0 : 1.0;
}
constexpr double kImprovementThreshold = 1e-12;

void check_shapes(const NetworkWeights& w, Family family) {
  const std::size_t h = static_cast<std::size_t>(w.n_hidden);
  const std::size_t d = static_cast<std::size_t>(w.d_in);
  const std::size_t k = static_cast<std::size_t>(w.n_out);
  if (w.d_in < 1 || w.n_hidden < 1 || (w.n_out != 1 && w.n_out != 2)) {
    throw std::invalid_argument("NetworkWeights: bad layer dimensions");
  }
  if (w.w1.size() != h * d || w.b1.size() != h || w.w2.size() != k * h ||
      w.b2.size() != k) {
    throw std::invalid_argument("NetworkWeights: array sizes disagree with dims");
  }
  if (family_arity(family) != w.n_out) {
    throw std::invalid_argument("NetworkWeights: n_out does not match " +
                                family_name(family) + " arity");
  }
}

/// Standardized inputs and errors laid out flat so mini-batches can index
/// without copying records.
struct FlatData {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> x;    // n rows of d, standardized
  std::vector<double> eps;  // n
};

FlatData flatten(const std::vector<PairRecord>& records, const Standardizer& stdz,
                 std::size_t d_expected) {
  FlatData f;
  f.n = records.size();
  f.d = d_expected;
  f.x.resize(f.n * f.d);
  f.eps.resize(f.n);
  for (std::size_t k = 0; k < f.n; ++k) {
    if (records[k].x.size() != d_expected) {
      throw std::invalid_argument("input dimension mismatch at record " +
                                  std::to_string(k));
    }
    const std::vector<double> xs = stdz.apply(records[k].x);
    std::copy(xs.begin(), xs.end(), f.x.begin() + static_cast<std::ptrdiff_t>(k * f.d));
    f.eps[k] = records[k].eps();
  }
  return f;
}

/// Loss of the rows data[idx[0..nb)] (identity selection when idx is null);
/// fills grad with the exact reverse-mode gradient when non-null. The PIT
/// sort permutation is treated as constant in the backward pass.
double loss_and_grad(const NetworkWeights& w, Family family, double beta,
                     double slope, const FlatData& data, const std::size_t* idx,
                     std::size_t nb, NetworkWeights* grad) {
  const std::size_t h = static_cast<std::size_t>(w.n_hidden);
  const std::size_t d = static_cast<std::size_t>(w.d_in);
  const std::size_t k_out = static_cast<std::size_t>(w.n_out);
  const std::size_t n = nb;
  if (n == 0) throw std::invalid_argument("loss: empty batch");

  std::vector<double> z1(n * h), hid(n * h), t_raw(n * k_out);
  std::vector<DistributionParams> theta(n);
  std::vector<double> eps(n), u(n), crps_sum_terms(n);

  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t row = idx ? idx[r] : r;
    const double* x = data.x.data() + row * d;
    eps[r] = data.eps[row];
    for (std::size_t j = 0; j < h; ++j) {
      double z = w.b1[j];
      const double* wr = w.w1.data() + j * d;
      for (std::size_t i = 0; i < d; ++i) z += wr[i] * x[i];
      z1[r * h + j] = z;
      hid[r * h + j] = z > 0.0 ? z : 0.0;
    }
    DistributionParams p;
    p.family = family;
    p.values = {0.0, 0.0};
    for (std::size_t o = 0; o < k_out; ++o) {
      double z = w.b2[o];
      const double* wr = w.w2.data() + o * h;
      for (std::size_t j = 0; j < h; ++j) z += wr[j] * hid[r * h + j];
      const double t = z > 0.0 ? z : slope * z;
      t_raw[r * k_out + o] = t;
      const double tc = std::clamp(t, -kOutClamp, kOutClamp);
      p.values[o] = std::exp(output_sign(family, o) * tc);
    }
    theta[r] = p;
    crps_sum_terms[r] = crps(p, eps[r]);
    u[r] = cdf(p, eps[r]);
  }

  double crps_total = 0.0;
  for (double c : crps_sum_terms) crps_total += c;
  const double crps_mean = crps_total / static_cast<double>(n);

  std::vector<std::size_t> ord(n);
  std::iota(ord.begin(), ord.end(), std::size_t{0});
  std::stable_sort(ord.begin(), ord.end(),
                   [&u](std::size_t a, std::size_t b) { return u[a] < u[b]; });
  std::vector<double> u_sorted(n);
  for (std::size_t j = 0; j < n; ++j) u_sorted[j] = u[ord[j]];
  const double rs = reliability_score_uniform(u_sorted);

  const double loss = beta * crps_mean + (1.0 - beta) * rs;
  if (!grad) return loss;

  grad->d_in = w.d_in;
  grad->n_hidden = w.n_hidden;
  grad->n_out = w.n_out;
  grad->w1.assign(h * d, 0.0);
  grad->b1.assign(h, 0.0);
  grad->w2.assign(k_out * h, 0.0);
  grad->b2.assign(k_out, 0.0);

  const std::vector<double> rs_grad_sorted = reliability_score_uniform_grad(u_sorted);
  std::vector<double> rs_grad(n);
  for (std::size_t j = 0; j < n; ++j) rs_grad[ord[j]] = rs_grad_sorted[j];

  std::vector<double> dz2(k_out), dh(h);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t row = idx ? idx[r] : r;
    const double* x = data.x.data() + row * d;
    const std::array<double, 2> dcrps = crps_param_grad(theta[r], eps[r]);
    const std::array<double, 2> dcdf = cdf_param_grad(theta[r], eps[r]);
    for (std::size_t o = 0; o < k_out; ++o) {
      const double dtheta = beta / static_cast<double>(n) * dcrps[o] +
                            (1.0 - beta) * rs_grad[r] * dcdf[o];
      const double t = t_raw[r * k_out + o];
      const double dt = (t >= -kOutClamp && t <= kOutClamp)
                            ? dtheta * theta[r].values[o] * output_sign(family, o)
                            : 0.0;
      dz2[o] = dt * (t_raw[r * k_out + o] > 0.0 ? 1.0 : slope);
    }
    for (std::size_t j = 0; j < h; ++j) {
      double acc = 0.0;
      for (std::size_t o = 0; o < k_out; ++o) {
        grad->w2[o * h + j] += dz2[o] * hid[r * h + j];
        acc += w.w2[o * h + j] * dz2[o];
      }
      dh[j] = acc;
    }
    for (std::size_t o = 0; o < k_out; ++o) grad->b2[o] += dz2[o];
    for (std::size_t j = 0; j < h; ++j) {
      const double dz1 = z1[r * h + j] > 0.0 ? dh[j] : 0.0;
      if (dz1 == 0.0) continue;
      double* gw = grad->w1.data() + j * d;
      for (std::size_t i = 0; i < d; ++i) gw[i] += dz1 * x[i];
      grad->b1[j] += dz1;
    }
  }
  return loss;
}

struct AdamState {
  double lr, b1, b2, eps;
  std::size_t t = 0;
  std::vector<double> m, v;

  AdamState(const TrainingConfig& cfg, std::size_t n_params)
      : lr(cfg.learning_rate), b1(cfg.adam_beta1), b2(cfg.adam_beta2),
        eps(cfg.adam_eps), m(n_params, 0.0), v(n_params, 0.0) {}

  void step(NetworkWeights& w, const NetworkWeights& g) {
    ++t;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    std::size_t off = 0;
    auto update = [&](std::vector<double>& p, const std::vector<double>& gp) {
      for (std::size_t i = 0; i < p.size(); ++i, ++off) {
        m[off] = b1 * m[off] + (1.0 - b1) * gp[i];
        v[off] = b2 * v[off] + (1.0 - b2) * gp[i] * gp[i];
        p[i] -= lr * (m[off] / c1) / (std::sqrt(v[off] / c2) + eps);
      }
    };
    update(w.w1, g.w1);
    update(w.b1, g.b1);
    update(w.w2, g.w2);
    update(w.b2, g.b2);
  }
};

}  // namespace

Standardizer Standardizer::identity(std::size_t d) {
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.stdev.assign(d, 1.0);
  return s;
}

std::vector<double> Standardizer::apply(const std::vector<double>& x) const {
  if (x.size() != mean.size()) {
    throw std::invalid_argument("Standardizer: dimension mismatch");
  }
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean[i]) / stdev[i];
  return out;
}

Standardizer fit_standardizer(const std::vector<PairRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("fit_standardizer: empty input");
  }
  const std::size_t d = records[0].x.size();
  const double n = static_cast<double>(records.size());
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.stdev.assign(d, 0.0);
  for (const PairRecord& r : records) {
    if (r.x.size() != d) {
      throw std::invalid_argument("fit_standardizer: ragged input dimensions");
    }
    for (std::size_t i = 0; i < d; ++i) s.mean[i] += r.x[i];
  }
  for (std::size_t i = 0; i < d; ++i) s.mean[i] /= n;
  for (const PairRecord& r : records) {
    for (std::size_t i = 0; i < d; ++i) {
      const double c = r.x[i] - s.mean[i];
      s.stdev[i] += c * c;
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    s.stdev[i] = std::max(std::sqrt(s.stdev[i] / n), 1e-8);
  }
  return s;
}

NetworkWeights init_weights(int d_in, int n_out, Rng& rng) {
  if (d_in < 1 || (n_out != 1 && n_out != 2)) {
    throw std::invalid_argument("init_weights: bad dimensions");
  }
  NetworkWeights w;
  w.d_in = d_in;
  w.n_out = n_out;
  const std::size_t h = static_cast<std::size_t>(w.n_hidden);
  const std::size_t d = static_cast<std::size_t>(d_in);
  const std::size_t k = static_cast<std::size_t>(n_out);
  const double lim1 = std::sqrt(6.0 / static_cast<double>(d + h));
  const double lim2 = std::sqrt(6.0 / static_cast<double>(h + k));
  w.w1.resize(h * d);
  for (double& v : w.w1) v = rng.uniform(-lim1, lim1);
  // Zero first-layer biases would place every ReLU kink at the origin of the
  // standardized input space; with few inputs the hidden units then start
  // pairwise proportional and sharp structure away from the center trains
  // far too slowly. Spreading the biases over +-1/sqrt(d_in) scatters the
  // kinks across the data range.
  const double blim = 1.0 / std::sqrt(static_cast<double>(d));
  w.b1.resize(h);
  for (double& v : w.b1) v = rng.uniform(-blim, blim);
  w.w2.resize(k * h);
  for (double& v : w.w2) v = rng.uniform(-lim2, lim2);
  w.b2.assign(k, 0.0);
  return w;
}

DistributionParams forward(const NetworkWeights& w, Family family,
                           const std::vector<double>& x_std, double leaky_slope) {
  check_shapes(w, family);
  if (x_std.size() != static_cast<std::size_t>(w.d_in)) {
    throw std::invalid_argument("forward: input dimension mismatch");
  }
  const std::size_t h = static_cast<std::size_t>(w.n_hidden);
  const std::size_t d = static_cast<std::size_t>(w.d_in);
  std::vector<double> hid(h);
  for (std::size_t j = 0; j < h; ++j) {
    double z = w.b1[j];
    for (std::size_t i = 0; i < d; ++i) z += w.w1[j * d + i] * x_std[i];
    hid[j] = z > 0.0 ? z : 0.0;
  }
  DistributionParams p;
  p.family = family;
  p.values = {0.0, 0.0};
  for (std::size_t o = 0; o < static_cast<std::size_t>(w.n_out); ++o) {
    double z = w.b2[o];
    for (std::size_t j = 0; j < h; ++j) z += w.w2[o * h + j] * hid[j];
    const double t = z > 0.0 ? z : leaky_slope * z;
    const double tc = std::clamp(t, -kOutClamp, kOutClamp);
    p.values[o] = std::exp(output_sign(family, o) * tc);
  }
  validate(p);
  return p;
}

double accrue_batch_loss(const NetworkWeights& w, Family family,
                         const BetaWeight& beta,
                         const std::vector<PairRecord>& batch,
                         const Standardizer& stdz, double leaky_slope) {
  check_shapes(w, family);
  if (batch.size() < 2) {
    throw std::invalid_argument("accrue_batch_loss: need at least 2 records");
  }
  const FlatData f = flatten(batch, stdz, static_cast<std::size_t>(w.d_in));
  return loss_and_grad(w, family, beta.value(), leaky_slope, f, nullptr, f.n,
                       nullptr);
}

NetworkWeights accrue_gradient(const NetworkWeights& w, Family family,
                               const BetaWeight& beta,
                               const std::vector<PairRecord>& batch,
                               const Standardizer& stdz, double leaky_slope) {
  check_shapes(w, family);
  if (batch.size() < 2) {
    throw std::invalid_argument("accrue_gradient: need at least 2 records");
  }
  const FlatData f = flatten(batch, stdz, static_cast<std::size_t>(w.d_in));
  NetworkWeights grad;
  loss_and_grad(w, family, beta.value(), leaky_slope, f, nullptr, f.n, &grad);
  return grad;
}

TrainResult train(const Dataset& data, Family family, const BetaWeight& beta,
                  const TrainingConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) {
    throw std::invalid_argument("train: learning_rate must be positive");
  }
  if (cfg.batch_size < 2) {
    throw std::invalid_argument("train: batch_size must be at least 2");
  }
  if (cfg.patience < 1 || cfg.max_epochs < 1) {
    throw std::invalid_argument("train: patience and max_epochs must be >= 1");
  }
  if (family == Family::Gamma) {
    throw std::invalid_argument("train: Gamma is a data-generation family only");
  }
  const std::vector<PairRecord> train_recs = data.partition(Split::Train);
  const std::vector<PairRecord> val_recs = data.partition(Split::Validation);
  if (train_recs.size() < 2 || val_recs.empty()) {
    throw std::invalid_argument(
        "train: need at least 2 training and 1 validation records");
  }

  const std::size_t d = train_recs[0].x.size();
  const Standardizer stdz = fit_standardizer(train_recs);
  const FlatData ftrain = flatten(train_recs, stdz, d);
  const FlatData fval = flatten(val_recs, stdz, d);

  Rng rng(cfg.seed);
  NetworkWeights w = init_weights(static_cast<int>(d), family_arity(family), rng);
  AdamState adam(cfg, w.parameter_count());
  NetworkWeights grad;

  // Batch boundaries over a shuffled index vector. A remainder of a single
  // row joins the previous batch so every batch holds >= 2 records.
  const std::size_t n = ftrain.n;
  const std::size_t bs = std::min(cfg.batch_size, n);
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t lo = 0; lo < n; lo += bs) {
    ranges.emplace_back(lo, std::min(lo + bs, n));
  }
  if (ranges.size() > 1 && ranges.back().second - ranges.back().first < 2) {
    ranges[ranges.size() - 2].second = n;
    ranges.pop_back();
  }

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  TrainResult result;
  result.standardizer = stdz;
  result.best_loss = std::numeric_limits<double>::infinity();
  double prev_loss = std::numeric_limits<double>::infinity();
  std::size_t stall = 0;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    shuffle(perm, rng);
    for (const auto& [lo, hi] : ranges) {
      const double batch_loss = loss_and_grad(w, family, beta.value(),
                                              cfg.leaky_slope, ftrain,
                                              perm.data() + lo, hi - lo, &grad);
      if (!std::isfinite(batch_loss)) {
        throw std::runtime_error("train: non-finite batch loss at epoch " +
                                 std::to_string(epoch + 1));
      }
      adam.step(w, grad);
    }
    const double val_loss = loss_and_grad(w, family, beta.value(), cfg.leaky_slope,
                                          fval, nullptr, fval.n, nullptr);
    if (!std::isfinite(val_loss)) {
      throw std::runtime_error("train: non-finite validation loss at epoch " +
                               std::to_string(epoch + 1));
    }
    result.history.push_back(val_loss);
    if (val_loss < result.best_loss) {
      result.best_loss = val_loss;
      result.best_epoch = epoch;
      result.weights = w;
    }
    // Plateau detection compares against the previous epoch, not the best
    // seen: mini-batch noise makes the validation curve oscillate around a
    // slow descent, and long gaps between new record lows are normal.
    if (val_loss < prev_loss - kImprovementThreshold) {
      stall = 0;
    } else {
      ++stall;
    }
    prev_loss = val_loss;
    if (stall >= cfg.patience) break;
  }
  return result;
}

}  // namespace accrue
