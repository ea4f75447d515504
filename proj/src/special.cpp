#include "accrue/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace accrue {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

// Acklam's rational approximation to the standard normal quantile.
// Relative error below 1.2e-9 everywhere; Newton polishing happens in the
// erf/erfc-space callers.
double probit_estimate(double p) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double erf_inv(double y) {
  if (!(y > -1.0 && y < 1.0)) {
    throw std::invalid_argument("erf_inv: argument must lie in (-1, 1)");
  }
  if (y == 0.0) return 0.0;

  const double ay = std::fabs(y);
  // erf(x) = 2*Phi(x*sqrt(2)) - 1, so the probit of (1+|y|)/2 seeds Newton.
  double x = probit_estimate(0.5 * (1.0 + ay)) / std::sqrt(2.0);

  if (ay < 0.9375) {
    // Newton on erf(x) - |y|; the subtraction is well conditioned here.
    for (int i = 0; i < 2; ++i) {
      double err = std::erf(x) - ay;
      x -= err * (kSqrtPi / 2.0) * std::exp(x * x);
    }
  } else {
    // Tail: 1 - |y| is exact (Sterbenz), erfc keeps full relative precision.
    double w = 1.0 - ay;
    for (int i = 0; i < 3; ++i) {
      double err = std::erfc(x) - w;
      x += err * (kSqrtPi / 2.0) * std::exp(x * x);
    }
  }
  return y < 0.0 ? -x : x;
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("std_normal_quantile: p must lie in (0, 1)");
  }
  // Resolve each half in erf space; 2p-1 near p=1 would lose tail precision.
  if (p <= 0.5) {
    return -std::sqrt(2.0) * erf_inv(1.0 - 2.0 * p);
  }
  return std::sqrt(2.0) * erf_inv(1.0 - 2.0 * (1.0 - p));
}

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("gamma_p: shape must be positive");
  if (!(x >= 0.0)) throw std::invalid_argument("gamma_p: x must be nonnegative");
  if (x == 0.0) return 0.0;

  const double log_norm = a * std::log(x) - x - std::lgamma(a);

  if (x < a + 1.0) {
    // Series for the lower function.
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 1000; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-17) break;
    }
    return sum * std::exp(log_norm);
  }

  // Lentz continued fraction for the upper function Q(a, x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-17) break;
  }
  double q = std::exp(log_norm) * h;
  double p = 1.0 - q;
  return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

double gamma_p_inv(double a, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("gamma_p_inv: p must lie in (0, 1)");
  }
  if (!(a > 0.0)) throw std::invalid_argument("gamma_p_inv: shape must be positive");

  // Wilson-Hilferty start, then safeguarded Newton on gamma_p.
  double z = std_normal_quantile(p);
  double t = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * std::sqrt(a));
  double x = a * t * t * t;
  if (!(x > 0.0) || !std::isfinite(x)) x = a * p;  // crude but safe fallback

  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  const double log_gamma_a = std::lgamma(a);

  for (int iter = 0; iter < 100; ++iter) {
    double f = gamma_p(a, x) - p;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    double log_pdf = (a - 1.0) * std::log(x) - x - log_gamma_a;
    double step = f * std::exp(-log_pdf);
    double next = x - step;
    if (!(next > lo && next < hi)) {
      next = std::isinf(hi) ? x * 2.0 : 0.5 * (lo + hi);
    }
    if (std::fabs(next - x) <= 1e-14 * (std::fabs(x) + 1e-300)) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

}  // namespace accrue
