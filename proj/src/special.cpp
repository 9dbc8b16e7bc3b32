#include "fierisk/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fierisk/error.hpp"

namespace fierisk::special {
namespace {

constexpr std::string_view kModule = "special";

// Acklam's rational approximation for the lower half, p <= 0.5.
double acklam_lower(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double gamma_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 10000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-17) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a) || !(x >= 0.0) || std::isnan(x)) {
    throw Error(ErrorKind::Domain, kModule, "incomplete gamma requires a > 0 and x >= 0");
  }
}

}  // namespace

double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::Domain, kModule, "normal quantile requires 0 < p < 1");
  }
  // 1 - p is exact for p >= 0.5, so the upper half reuses the lower branch
  // where the CDF residual can be evaluated without cancellation.
  if (p > 0.5) return -normal_quantile(1.0 - p);

  double x = acklam_lower(p);
  for (int i = 0; i < 2; ++i) {
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_continued_fraction(a, x);
}

double chi2_pdf(double x, double dof) {
  if (!(dof > 0.0)) throw Error(ErrorKind::Domain, kModule, "chi-square requires dof > 0");
  if (x < 0.0) return 0.0;
  const double a = 0.5 * dof;
  if (x == 0.0) {
    if (a < 1.0) return std::numeric_limits<double>::infinity();
    return a == 1.0 ? 0.5 : 0.0;
  }
  return 0.5 * std::exp((a - 1.0) * std::log(0.5 * x) - 0.5 * x - std::lgamma(a));
}

double chi2_cdf(double x, double dof) {
  if (!(dof > 0.0)) throw Error(ErrorKind::Domain, kModule, "chi-square requires dof > 0");
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_quantile(double p, double dof) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::Domain, kModule, "chi-square quantile requires 0 < p < 1");
  }
  if (!(dof > 0.0) || !std::isfinite(dof)) {
    throw Error(ErrorKind::Domain, kModule, "chi-square requires dof > 0");
  }
  const double a = 0.5 * dof;
  const bool upper = p > 0.5;
  const double target = upper ? 1.0 - p : p;
  // residual > 0 means x is above the quantile
  auto residual = [&](double x) {
    return upper ? target - gamma_q(a, 0.5 * x) : gamma_p(a, 0.5 * x) - target;
  };

  // Wilson-Hilferty start
  const double z = normal_quantile(p);
  const double h = 2.0 / (9.0 * dof);
  double x = dof * std::pow(1.0 - h + z * std::sqrt(h), 3.0);
  if (!(x > 0.0)) {
    // small-x series: P(a, x/2) ~ (x/2)^a / Gamma(a + 1)
    x = 2.0 * std::exp((std::log(p) + std::lgamma(a + 1.0)) / a);
  }

  double lo = 0.0;
  double hi = std::max(2.0 * x, dof + 10.0);
  while (residual(hi) < 0.0) hi *= 2.0;

  for (int it = 0; it < 200; ++it) {
    const double r = residual(x);
    if (r == 0.0) return x;
    if (r > 0.0) hi = x; else lo = x;
    const double dens = chi2_pdf(x, dof);
    double next = (dens > 0.0 && std::isfinite(dens)) ? x - r / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * x) return next;
    x = next;
  }
  return x;
}

}  // namespace fierisk::special
