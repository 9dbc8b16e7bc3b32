#include "fierisk/fracdiff.hpp"

#include <algorithm>
#include <cmath>

#include "fierisk/error.hpp"
#include "fierisk/polynomial.hpp"

namespace fierisk {
namespace {

constexpr std::string_view kModule = "fracdiff";

void check_d(double d) {
  if (!std::isfinite(d)) throw Error(ErrorKind::Domain, kModule, "d must be finite");
  if (!(std::abs(d) < 0.5)) throw Error(ErrorKind::Domain, kModule, "d must lie in (-0.5, 0.5)");
}

// c_k of (1 - L)^d with no range check; callers validate d.
std::vector<double> binomial_series(double d, std::size_t order) {
  std::vector<double> c(order + 1);
  c[0] = 1.0;
  for (std::size_t k = 1; k <= order; ++k) {
    c[k] = c[k - 1] * ((static_cast<double>(k) - 1.0 - d) / static_cast<double>(k));
  }
  return c;
}

}  // namespace

CoefficientSeries::CoefficientSeries(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "empty coefficient series");
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw Error(ErrorKind::InvalidArgument, kModule, "non-finite coefficient");
  }
}

CoefficientSeries frac_diff_coeffs(double d, std::size_t order) {
  check_d(d);
  return CoefficientSeries(binomial_series(d, order));
}

CoefficientSeries series_invert(const CoefficientSeries& b, std::size_t order) {
  if (b[0] == 0.0) throw Error(ErrorKind::SingularSeries, kModule, "constant term is zero");
  std::vector<double> c(order + 1, 0.0);
  const auto bc = b.coeffs();
  c[0] = 1.0 / bc[0];
  for (std::size_t k = 1; k <= order; ++k) {
    double acc = 0.0;
    const std::size_t jmax = std::min(k, bc.size() - 1);
    for (std::size_t j = 1; j <= jmax; ++j) acc += bc[j] * c[k - j];
    c[k] = -acc / bc[0];
  }
  return CoefficientSeries(std::move(c));
}

CoefficientSeries series_mul(const CoefficientSeries& a, const CoefficientSeries& b,
                             std::size_t order) {
  std::vector<double> c(order + 1, 0.0);
  const auto ac = a.coeffs();
  const auto bc = b.coeffs();
  for (std::size_t i = 0; i < ac.size() && i <= order; ++i) {
    if (ac[i] == 0.0) continue;
    const std::size_t jmax = std::min(bc.size() - 1, order - i);
    for (std::size_t j = 0; j <= jmax; ++j) c[i + j] += ac[i] * bc[j];
  }
  return CoefficientSeries(std::move(c));
}

CoefficientSeries inverse_operator_coeffs(std::span<const double> beta, double d,
                                          std::size_t order) {
  check_d(d);
  if (!is_stable_ar(beta)) {
    throw Error(ErrorKind::NonInvertible, kModule, "beta(z) has a root on or inside the unit circle");
  }
  // (1 - L)^{-d} directly by the same recursion, then divide by beta(L):
  // xi_k = u_k + sum_j beta_j xi_{k-j}.
  std::vector<double> xi = binomial_series(-d, order);
  for (std::size_t k = 1; k <= order; ++k) {
    const std::size_t jmax = std::min(k, beta.size());
    double acc = 0.0;
    for (std::size_t j = 1; j <= jmax; ++j) acc += beta[j - 1] * xi[k - j];
    xi[k] += acc;
  }
  return CoefficientSeries(std::move(xi));
}

CoefficientSeries lambda_coeffs(const FiegarchSpec& spec, std::size_t order) {
  const CoefficientSeries xi = inverse_operator_coeffs(spec.beta(), spec.d(), order);
  const auto alpha = spec.alpha();
  if (alpha.empty()) return xi;
  // multiply by alpha(L) = 1 - sum alpha_i L^i
  std::vector<double> lambda(xi.coeffs().begin(), xi.coeffs().end());
  for (std::size_t k = order; k >= 1; --k) {
    const std::size_t imax = std::min(k, alpha.size());
    for (std::size_t i = 1; i <= imax; ++i) lambda[k] -= alpha[i - 1] * xi[k - i];
  }
  return CoefficientSeries(std::move(lambda));
}

}  // namespace fierisk
