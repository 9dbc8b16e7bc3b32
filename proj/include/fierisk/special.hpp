#pragma once

// Normal and chi-square distribution functions used by the risk measures.
// Quantiles are accurate to well below 1e-8 absolute over (1e-300, 1 - 1e-16).

namespace fierisk::special {

double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;

/// Inverse of the standard normal CDF. Throws Error(Domain) unless 0 < p < 1.
double normal_quantile(double p);

/// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

double chi2_pdf(double x, double dof);
double chi2_cdf(double x, double dof);

/// p-quantile of the chi-square law with `dof` degrees of freedom.
double chi2_quantile(double p, double dof);

}  // namespace fierisk::special
