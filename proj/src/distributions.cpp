#include "accrue/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "accrue/special.hpp"

namespace accrue {

namespace {

constexpr double kParamFloor = 1e-12;
constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2 = 1.4142135623730950488;
// Largest exponent magnitude fed to std::exp; e^{+-700} stays finite.
constexpr double kExpClamp = 700.0;

double clamped_exp(double t) {
  if (t > kExpClamp) t = kExpClamp;
  if (t < -kExpClamp) t = -kExpClamp;
  return std::exp(t);
}

[[noreturn]] void reject_gamma(const char* op) {
  throw std::invalid_argument(std::string(op) +
                              ": Gamma is a data-generation family only");
}

void require_finite_eps(const char* op, double eps) {
  if (!std::isfinite(eps)) {
    throw std::invalid_argument(std::string(op) + ": eps must be finite");
  }
}

}  // namespace

int family_arity(Family family) {
  return family == Family::Gaussian ? 1 : 2;
}

std::string family_name(Family family) {
  switch (family) {
    case Family::Gaussian: return "gaussian";
    case Family::TwoPieceGaussian: return "tpg";
    case Family::AsymmetricLaplace: return "al";
    case Family::Gamma: return "gamma";
  }
  throw std::logic_error("family_name: unknown family");
}

Family family_from_name(const std::string& name) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "tpg") return Family::TwoPieceGaussian;
  if (name == "al") return Family::AsymmetricLaplace;
  if (name == "gamma") return Family::Gamma;
  throw std::invalid_argument("unknown family name '" + name + "'");
}

void validate(const DistributionParams& d) {
  const int n = d.arity();
  for (int i = 0; i < n; ++i) {
    const double v = d.values[static_cast<std::size_t>(i)];
    if (!std::isfinite(v) || v < kParamFloor) {
      throw std::invalid_argument(family_name(d.family) + " parameter " +
                                  std::to_string(i + 1) +
                                  " must be finite and >= 1e-12, got " +
                                  std::to_string(v));
    }
  }
}

DistributionParams make_params(Family family, double p1, double p2) {
  DistributionParams d;
  d.family = family;
  d.values = {p1, p2};
  validate(d);
  return d;
}

DistributionParams gaussian_params(double sigma) {
  return make_params(Family::Gaussian, sigma);
}

DistributionParams tpg_params(double sigma1, double sigma2) {
  return make_params(Family::TwoPieceGaussian, sigma1, sigma2);
}

DistributionParams al_params(double lambda, double kappa) {
  return make_params(Family::AsymmetricLaplace, lambda, kappa);
}

DistributionParams gamma_params(double alpha, double beta) {
  return make_params(Family::Gamma, alpha, beta);
}

double pdf(const DistributionParams& d, double eps) {
  validate(d);
  require_finite_eps("pdf", eps);
  switch (d.family) {
    case Family::Gaussian: {
      const double s = d.p1();
      const double z = eps / s;
      return std::exp(-0.5 * z * z) / (s * kSqrt2 * kSqrtPi);
    }
    case Family::TwoPieceGaussian: {
      const double side = eps <= 0.0 ? d.p1() : d.p2();
      const double z = eps / side;
      return kSqrt2 * std::exp(-0.5 * z * z) / (kSqrtPi * (d.p1() + d.p2()));
    }
    case Family::AsymmetricLaplace: {
      const double lambda = d.p1(), kappa = d.p2();
      const double norm = lambda * kappa / (1.0 + kappa * kappa);
      const double t = eps <= 0.0 ? (lambda / kappa) * eps : -lambda * kappa * eps;
      return norm * clamped_exp(t);
    }
    case Family::Gamma: {
      const double alpha = d.p1(), beta = d.p2();
      if (eps <= 0.0) return 0.0;
      return std::exp(alpha * std::log(beta) + (alpha - 1.0) * std::log(eps) -
                      beta * eps - std::lgamma(alpha));
    }
  }
  throw std::logic_error("pdf: unknown family");
}

double cdf(const DistributionParams& d, double eps) {
  validate(d);
  require_finite_eps("cdf", eps);
  switch (d.family) {
    case Family::Gaussian:
      return 0.5 * (1.0 + std::erf(eps / (kSqrt2 * d.p1())));
    case Family::TwoPieceGaussian: {
      const double s1 = d.p1(), s2 = d.p2(), s = s1 + s2;
      if (eps <= 0.0) return (s1 / s) * (1.0 + std::erf(eps / (kSqrt2 * s1)));
      return (s1 + s2 * std::erf(eps / (kSqrt2 * s2))) / s;
    }
    case Family::AsymmetricLaplace: {
      const double lambda = d.p1(), kappa = d.p2();
      const double q = 1.0 + kappa * kappa;
      if (eps <= 0.0) return (kappa * kappa / q) * clamped_exp(lambda / kappa * eps);
      return 1.0 - clamped_exp(-lambda * kappa * eps) / q;
    }
    case Family::Gamma:
      if (eps <= 0.0) return 0.0;
      return gamma_p(d.p1(), d.p2() * eps);
  }
  throw std::logic_error("cdf: unknown family");
}

double quantile(const DistributionParams& d, double p) {
  validate(d);
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("quantile: p must lie in (0, 1)");
  }
  switch (d.family) {
    case Family::Gaussian:
      return d.p1() * std_normal_quantile(p);
    case Family::TwoPieceGaussian: {
      const double s1 = d.p1(), s2 = d.p2(), s = s1 + s2;
      // Branch point is the mass left of the mode, cdf(0) = s1 / s.
      if (p <= s1 / s) return kSqrt2 * s1 * erf_inv(p * s / s1 - 1.0);
      return kSqrt2 * s2 * erf_inv((p * s - s1) / s2);
    }
    case Family::AsymmetricLaplace: {
      const double lambda = d.p1(), kappa = d.p2();
      const double q = 1.0 + kappa * kappa;
      // cdf(0) = kappa^2 / q.
      if (p <= kappa * kappa / q) {
        return (kappa / lambda) * std::log(p * q / (kappa * kappa));
      }
      return -std::log((1.0 - p) * q) / (lambda * kappa);
    }
    case Family::Gamma:
      return gamma_p_inv(d.p1(), p) / d.p2();
  }
  throw std::logic_error("quantile: unknown family");
}

double sample(const DistributionParams& d, Rng& rng) {
  if (d.family == Family::Gamma) return gamma_sample(d.p1(), d.p2(), rng);
  return quantile(d, rng.uniform01());
}

double gamma_sample(double alpha, double beta, Rng& rng) {
  if (!(alpha >= kParamFloor) || !(beta >= kParamFloor)) {
    throw std::invalid_argument("gamma_sample: parameters must be >= 1e-12");
  }
  // Marsaglia-Tsang squeeze; shapes below 1 are boosted to alpha + 1 and
  // scaled back by u^{1/alpha}.
  double boost = 1.0;
  double a = alpha;
  if (alpha < 1.0) {
    a = alpha + 1.0;
    boost = std::pow(rng.uniform01(), 1.0 / alpha);
  }
  const double dd = a - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(dd));
  for (;;) {
    const double x = std_normal_quantile(rng.uniform01());
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.uniform01();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return boost * dd * v / beta;
    if (std::log(u) < 0.5 * x2 + dd * (1.0 - v + std::log(v))) {
      return boost * dd * v / beta;
    }
  }
}

std::array<double, 2> cdf_param_grad(const DistributionParams& d, double eps) {
  switch (d.family) {
    case Family::Gaussian: {
      const double s = d.p1();
      const double z = eps / s;
      const double phi = std::exp(-0.5 * z * z) / (kSqrt2 * kSqrtPi);
      return {-(eps / (s * s)) * phi, 0.0};
    }
    case Family::TwoPieceGaussian: {
      const double s1 = d.p1(), s2 = d.p2(), s = s1 + s2;
      if (eps <= 0.0) {
        const double z = eps / (kSqrt2 * s1);
        const double tail = 1.0 + std::erf(z);
        const double bump = kSqrt2 * eps * std::exp(-z * z) / (kSqrtPi * s * s1);
        return {(s2 / (s * s)) * tail - bump, -(s1 / (s * s)) * tail};
      }
      const double w = eps / (kSqrt2 * s2);
      const double tail = 1.0 - std::erf(w);
      const double bump = kSqrt2 * eps * std::exp(-w * w) / (kSqrtPi * s * s2);
      return {(s2 / (s * s)) * tail, -(s1 / (s * s)) * tail - bump};
    }
    case Family::AsymmetricLaplace: {
      const double lambda = d.p1(), kappa = d.p2();
      const double q = 1.0 + kappa * kappa;
      if (eps <= 0.0) {
        const double e = clamped_exp(lambda / kappa * eps);
        return {(kappa * eps / q) * e,
                (2.0 * kappa / (q * q)) * e - (lambda * eps / q) * e};
      }
      const double e = clamped_exp(-lambda * kappa * eps);
      return {(kappa * eps / q) * e,
              (2.0 * kappa / (q * q)) * e + (lambda * eps / q) * e};
    }
    case Family::Gamma:
      reject_gamma("cdf_param_grad");
  }
  throw std::logic_error("cdf_param_grad: unknown family");
}

}  // namespace accrue
