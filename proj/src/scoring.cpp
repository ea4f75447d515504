#include "accrue/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "accrue/special.hpp"

namespace accrue {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrt2OverPi = 0.79788456080286535588;
constexpr double kExpClamp = 700.0;

double clamped_exp(double t) {
  if (t > kExpClamp) t = kExpClamp;
  if (t < -kExpClamp) t = -kExpClamp;
  return std::exp(t);
}

void require_positive(const char* op, const char* name, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(op) + ": " + name +
                                " must be positive and finite");
  }
}

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / (kSqrt2 * kSqrtPi); }

double std_normal_cdf(double z) { return 0.5 * (1.0 + std::erf(z / kSqrt2)); }

}  // namespace

BetaWeight::BetaWeight(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0)) {
    throw std::invalid_argument("BetaWeight: value must lie in (0, 1), got " +
                                std::to_string(value));
  }
}

double gaussian_crps(double eps, double sigma) {
  require_positive("gaussian_crps", "sigma", sigma);
  const double z = eps / sigma;
  return eps * std::erf(z / kSqrt2) + sigma * kSqrt2OverPi * std::exp(-0.5 * z * z) -
         sigma / kSqrtPi;
}

double tpg_crps(double eps, double sigma1, double sigma2) {
  require_positive("tpg_crps", "sigma1", sigma1);
  require_positive("tpg_crps", "sigma2", sigma2);
  const double s = sigma1 + sigma2;
  const double cubes = sigma1 * sigma1 * sigma1 + sigma2 * sigma2 * sigma2;
  if (eps <= 0.0) {
    const double z = eps / sigma1;
    const double hug = z * std_normal_cdf(z) + std_normal_pdf(z);
    const double g = kSqrt2 * sigma2 * (sigma2 * sigma2 - sigma1 * sigma1) - cubes;
    return 4.0 * sigma1 * sigma1 / s * hug - eps + 2.0 / kSqrtPi * g / (s * s);
  }
  const double w = eps / sigma2;
  const double hug = w * std_normal_cdf(w) + std_normal_pdf(w);
  const double h = kSqrt2 * sigma1 * (sigma1 * sigma1 - sigma2 * sigma2) - cubes;
  // (sigma1 - 3 sigma2) / s is the factored form of ((s1-s2)^2 - 4 s2^2) / s^2.
  return 4.0 * sigma2 * sigma2 / s * hug + (sigma1 - 3.0 * sigma2) / s * eps +
         2.0 / kSqrtPi * h / (s * s);
}

double al_crps(double eps, double lambda, double kappa) {
  require_positive("al_crps", "lambda", lambda);
  require_positive("al_crps", "kappa", kappa);
  const double k2 = kappa * kappa;
  const double q = 1.0 + k2;
  const double k3 = k2 * kappa;
  const double tail_const = (k3 * k3 + 1.0) / (2.0 * lambda * kappa * q * q);
  if (eps <= 0.0) {
    const double e = clamped_exp(lambda / kappa * eps);
    return -eps + 2.0 * k3 / (lambda * q) * (e - 1.0) + tail_const;
  }
  const double e = clamped_exp(-lambda * kappa * eps);
  return eps + 2.0 / (lambda * kappa * q) * (e - 1.0) + tail_const;
}

double crps(const DistributionParams& d, double eps) {
  switch (d.family) {
    case Family::Gaussian: return gaussian_crps(eps, d.p1());
    case Family::TwoPieceGaussian: return tpg_crps(eps, d.p1(), d.p2());
    case Family::AsymmetricLaplace: return al_crps(eps, d.p1(), d.p2());
    case Family::Gamma:
      throw std::invalid_argument("crps: Gamma is a data-generation family only");
  }
  throw std::logic_error("crps: unknown family");
}

std::array<double, 2> crps_param_grad(const DistributionParams& d, double eps) {
  switch (d.family) {
    case Family::Gaussian: {
      const double sigma = d.p1();
      const double z = eps / sigma;
      return {kSqrt2OverPi * std::exp(-0.5 * z * z) - 1.0 / kSqrtPi, 0.0};
    }
    case Family::TwoPieceGaussian: {
      const double s1 = d.p1(), s2 = d.p2();
      const double s = s1 + s2, s2q = s * s, s3q = s2q * s;
      const double cubes = s1 * s1 * s1 + s2 * s2 * s2;
      if (eps <= 0.0) {
        const double z = eps / s1;
        const double hug = z * std_normal_cdf(z) + std_normal_pdf(z);
        const double g = kSqrt2 * s2 * (s2 * s2 - s1 * s1) - cubes;
        const double dg1 = -2.0 * kSqrt2 * s1 * s2 - 3.0 * s1 * s1;
        const double dg2 = kSqrt2 * (3.0 * s2 * s2 - s1 * s1) - 3.0 * s2 * s2;
        const double d1 = 4.0 * s1 * (s1 + 2.0 * s2) / s2q * hug -
                          4.0 * s1 * z / s * std_normal_cdf(z) +
                          2.0 / kSqrtPi * (dg1 / s2q - 2.0 * g / s3q);
        const double d2 = -4.0 * s1 * s1 / s2q * hug +
                          2.0 / kSqrtPi * (dg2 / s2q - 2.0 * g / s3q);
        return {d1, d2};
      }
      const double w = eps / s2;
      const double hug = w * std_normal_cdf(w) + std_normal_pdf(w);
      const double h = kSqrt2 * s1 * (s1 * s1 - s2 * s2) - cubes;
      const double dh1 = kSqrt2 * (3.0 * s1 * s1 - s2 * s2) - 3.0 * s1 * s1;
      const double dh2 = -2.0 * kSqrt2 * s1 * s2 - 3.0 * s2 * s2;
      const double d1 = -4.0 * s2 * s2 / s2q * hug + 4.0 * s2 / s2q * eps +
                        2.0 / kSqrtPi * (dh1 / s2q - 2.0 * h / s3q);
      const double d2 = 4.0 * s2 * (s2 + 2.0 * s1) / s2q * hug -
                        4.0 * s2 * w / s * std_normal_cdf(w) - 4.0 * s1 / s2q * eps +
                        2.0 / kSqrtPi * (dh2 / s2q - 2.0 * h / s3q);
      return {d1, d2};
    }
    case Family::AsymmetricLaplace: {
      const double lambda = d.p1(), kappa = d.p2();
      const double k2 = kappa * kappa, q = 1.0 + k2, k3 = k2 * kappa;
      const double k6p1 = k3 * k3 + 1.0;
      const double tail_const = k6p1 / (2.0 * lambda * kappa * q * q);
      const double dtail_dl = -tail_const / lambda;
      const double dtail_dk = (6.0 * k3 * k3 * q - k6p1 * (1.0 + 5.0 * k2)) /
                              (2.0 * lambda * k2 * q * q * q);
      if (eps <= 0.0) {
        const double e = clamped_exp(lambda / kappa * eps);
        const double dl = -2.0 * k3 / (lambda * lambda * q) * (e - 1.0) +
                          2.0 * k2 * eps / (lambda * q) * e + dtail_dl;
        const double dk = 2.0 * k2 * (3.0 + k2) / (lambda * q * q) * (e - 1.0) -
                          2.0 * kappa * eps / q * e + dtail_dk;
        return {dl, dk};
      }
      const double e = clamped_exp(-lambda * kappa * eps);
      const double dl = -2.0 / (lambda * lambda * kappa * q) * (e - 1.0) -
                        2.0 * eps / (lambda * q) * e + dtail_dl;
      const double dk = -2.0 * (1.0 + 3.0 * k2) / (lambda * k2 * q * q) * (e - 1.0) -
                        2.0 * eps / (kappa * q) * e + dtail_dk;
      return {dl, dk};
    }
    case Family::Gamma:
      throw std::invalid_argument(
          "crps_param_grad: Gamma is a data-generation family only");
  }
  throw std::logic_error("crps_param_grad: unknown family");
}

double mean_crps(const std::vector<double>& errors,
                 const std::vector<DistributionParams>& params) {
  if (errors.empty()) throw std::invalid_argument("mean_crps: empty input");
  if (errors.size() != params.size()) {
    throw std::invalid_argument("mean_crps: length mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    total += crps(params[i], errors[i]);
  }
  return total / static_cast<double>(errors.size());
}

double reliability_score_uniform(const std::vector<double>& u_sorted) {
  const std::size_t n = u_sorted.size();
  if (n == 0) throw std::invalid_argument("reliability_score_uniform: empty input");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(u_sorted[i] >= 0.0 && u_sorted[i] <= 1.0)) {
      throw std::invalid_argument(
          "reliability_score_uniform: entries must lie in [0, 1]");
    }
    if (i > 0 && u_sorted[i] < u_sorted[i - 1]) {
      throw std::invalid_argument(
          "reliability_score_uniform: input must be sorted ascending");
    }
  }
  const double dn = static_cast<double>(n);
  double sq = 0.0;
  for (double u : u_sorted) sq += u * u;
  double steps = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double di = static_cast<double>(i);
    steps += di * di * (u_sorted[i] - u_sorted[i - 1]);
  }
  return 1.0 / 3.0 - u_sorted[n - 1] + sq / dn + steps / (dn * dn);
}

std::vector<double> reliability_score_uniform_grad(
    const std::vector<double>& u_sorted) {
  const std::size_t n = u_sorted.size();
  if (n == 0) {
    throw std::invalid_argument("reliability_score_uniform_grad: empty input");
  }
  const double dn = static_cast<double>(n);
  std::vector<double> grad(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rank = static_cast<double>(i + 1);
    grad[i] = 2.0 * u_sorted[i] / dn - (2.0 * rank - 1.0) / (dn * dn);
  }
  return grad;
}

double gaussian_rs(const std::vector<double>& eta_sorted) {
  const std::size_t n = eta_sorted.size();
  if (n == 0) throw std::invalid_argument("gaussian_rs: empty input");
  for (std::size_t i = 1; i < n; ++i) {
    if (eta_sorted[i] < eta_sorted[i - 1]) {
      throw std::invalid_argument("gaussian_rs: input must be sorted ascending");
    }
  }
  const double dn = static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double eta = eta_sorted[i];
    const double rank = static_cast<double>(i + 1);
    total += eta / dn * (std::erf(eta) + 1.0) - eta / (dn * dn) * (2.0 * rank - 1.0) +
             std::exp(-eta * eta) / (kSqrtPi * dn);
  }
  return total - 0.5 * kSqrt2OverPi;
}

double gaussian_rs_min(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gaussian_rs_min: n must be positive");
  const double dn = static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = erf_inv((2.0 * static_cast<double>(i) - 1.0) / dn - 1.0);
    total += std::exp(-t * t);
  }
  return total / (kSqrtPi * dn) - 0.5 * kSqrt2OverPi;
}

PitResult pit_transform_with_order(const std::vector<double>& errors,
                                   const std::vector<DistributionParams>& params) {
  if (errors.size() != params.size()) {
    throw std::invalid_argument("pit_transform: length mismatch");
  }
  const std::size_t n = errors.size();
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = cdf(params[i], errors[i]);

  PitResult out;
  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&u](std::size_t a, std::size_t b) { return u[a] < u[b]; });
  out.u_sorted.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.u_sorted[j] = u[out.order[j]];
  return out;
}

std::vector<double> pit_transform(const std::vector<double>& errors,
                                  const std::vector<DistributionParams>& params) {
  return pit_transform_with_order(errors, params).u_sorted;
}

double accrue_loss(const ScorePair& s, const BetaWeight& beta) {
  if (!std::isfinite(s.crps_mean) || !std::isfinite(s.rs) || s.crps_mean < 0.0 ||
      s.rs < 0.0) {
    throw std::invalid_argument("accrue_loss: scores must be finite and >= 0");
  }
  const double b = beta.value();
  return b * s.crps_mean + (1.0 - b) * s.rs;
}

BetaWeight gaussian_beta_heuristic(const std::vector<double>& errors) {
  const std::size_t n = errors.size();
  if (n < 2) {
    throw std::invalid_argument("gaussian_beta_heuristic: need at least 2 errors");
  }
  const double sum = std::accumulate(errors.begin(), errors.end(), 0.0);
  double crps_min = std::sqrt(std::log(4.0)) / (2.0 * static_cast<double>(n)) * sum;
  // Signed errors can drive the printed formula nonpositive; the floor keeps
  // the ratio defined.
  crps_min = std::max(crps_min, std::numeric_limits<double>::epsilon());
  const double rs_min = gaussian_rs_min(n);
  const double raw = rs_min / (crps_min + rs_min);
  return BetaWeight(std::clamp(raw, 0.01, 0.99));
}

}  // namespace accrue
