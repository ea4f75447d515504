#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "accrue/rng.hpp"

namespace accrue {

/// Error-distribution families. Gamma is a data-generation device only and is
/// rejected everywhere a family is learned or scored.
enum class Family { Gaussian, TwoPieceGaussian, AsymmetricLaplace, Gamma };

/// Number of free parameters of a family.
int family_arity(Family family);

/// Short lowercase tag ("gaussian", "tpg", "al", "gamma").
std::string family_name(Family family);
Family family_from_name(const std::string& name);

/// A family tag plus its positive parameter vector:
///   Gaussian          [sigma]
///   TwoPieceGaussian  [sigma1, sigma2]   (left / right scale)
///   AsymmetricLaplace [lambda, kappa]    (scale / asymmetry)
///   Gamma             [alpha, beta]      (shape / rate)
/// Parameters below 1e-12 are rejected at construction.
struct DistributionParams {
  Family family = Family::Gaussian;
  std::array<double, 2> values{1.0, 0.0};

  int arity() const { return family_arity(family); }
  double p1() const { return values[0]; }
  double p2() const { return values[1]; }
};

DistributionParams gaussian_params(double sigma);
DistributionParams tpg_params(double sigma1, double sigma2);
DistributionParams al_params(double lambda, double kappa);
DistributionParams gamma_params(double alpha, double beta);
DistributionParams make_params(Family family, double p1, double p2 = 0.0);

/// Throws std::invalid_argument unless every parameter exceeds the 1e-12
/// floor and is finite.
void validate(const DistributionParams& d);

/// Density of the error distribution centered at the prediction (mode at 0).
double pdf(const DistributionParams& d, double eps);

/// Cumulative distribution of the error; continuous and nondecreasing.
double cdf(const DistributionParams& d, double eps);

/// Inverse CDF, p in (0, 1). Closed form except Gamma (safeguarded Newton).
double quantile(const DistributionParams& d, double p);

/// Inverse-CDF draw: quantile(d, u) with u uniform on (0, 1). Gamma draws use
/// Marsaglia-Tsang rejection instead, since its quantile has no closed form.
double sample(const DistributionParams& d, Rng& rng);

/// Gamma(shape alpha, rate beta) variate by Marsaglia-Tsang squeeze; the
/// shape-boost trick covers alpha < 1.
double gamma_sample(double alpha, double beta, Rng& rng);

/// d cdf / d params at fixed eps; entries beyond the family arity are zero.
/// Used by the training backward pass.
std::array<double, 2> cdf_param_grad(const DistributionParams& d, double eps);

}  // namespace accrue
