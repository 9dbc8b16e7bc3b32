#include "fierisk/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

namespace fierisk {

double min_root_modulus(std::span<const double> coeffs) {
  std::size_t degree = coeffs.size();
  while (degree > 0 && coeffs[degree - 1] == 0.0) --degree;
  if (degree == 0) return 0.0;  // zero polynomial: every z is a root
  --degree;
  if (degree == 0) return std::numeric_limits<double>::infinity();
  if (coeffs[0] == 0.0) return 0.0;
  if (degree == 1) return std::abs(coeffs[0] / coeffs[1]);

  const int n = static_cast<int>(degree);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  const double lead = coeffs[degree];
  for (int j = 0; j < n; ++j) companion(0, j) = -coeffs[degree - 1 - j] / lead;
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& root : solver.eigenvalues()) smallest = std::min(smallest, std::abs(root));
  return smallest;
}

bool is_stable_ar(std::span<const double> phi) {
  std::vector<double> c(phi.size() + 1);
  c[0] = 1.0;
  for (std::size_t j = 0; j < phi.size(); ++j) c[j + 1] = -phi[j];
  return min_root_modulus(c) > 1.0 + kUnitRootTolerance;
}

bool is_stable_ma(std::span<const double> theta) {
  std::vector<double> c(theta.size() + 1);
  c[0] = 1.0;
  for (std::size_t j = 0; j < theta.size(); ++j) c[j + 1] = theta[j];
  return min_root_modulus(c) > 1.0 + kUnitRootTolerance;
}

std::vector<double> pacf_to_ar(std::span<const double> pacf) {
  std::vector<double> phi;
  phi.reserve(pacf.size());
  for (std::size_t k = 0; k < pacf.size(); ++k) {
    std::vector<double> next(k + 1);
    for (std::size_t j = 0; j < k; ++j) next[j] = phi[j] - pacf[k] * phi[k - 1 - j];
    next[k] = pacf[k];
    phi = std::move(next);
  }
  return phi;
}

std::vector<double> ar_to_pacf(std::span<const double> phi) {
  std::vector<double> current(phi.begin(), phi.end());
  std::vector<double> pacf(phi.size());
  for (std::size_t k = phi.size(); k > 0; --k) {
    const double r = current[k - 1];
    if (!(std::abs(r) < 1.0)) return {};
    pacf[k - 1] = r;
    std::vector<double> prev(k - 1);
    const double denom = 1.0 - r * r;
    for (std::size_t j = 0; j + 1 < k; ++j) prev[j] = (current[j] + r * current[k - 2 - j]) / denom;
    current = std::move(prev);
  }
  return pacf;
}

}  // namespace fierisk
