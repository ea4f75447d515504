#pragma once

namespace accrue {

/// Inverse error function: returns x with erf(x) = y, y in (-1, 1).
/// Rational initial guess refined by Newton steps in erf/erfc space;
/// round-trips erf to a few ulps over the whole open interval.
double erf_inv(double y);

/// Standard normal quantile, p in (0, 1).
double std_normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
double gamma_p(double a, double x);

/// Inverse of gamma_p in x for fixed shape a: gamma_p(a, result) = p.
double gamma_p_inv(double a, double p);

}  // namespace accrue
