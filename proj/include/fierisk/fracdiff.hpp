#pragma once

// Truncated power series in the lag operator L.
//
// frac_diff_coeffs(d, M) gives c_k in (1 - L)^d = sum_k c_k L^k, generated by
// the multiplicative recursion c_k = c_{k-1} (k - 1 - d) / k, c_0 = 1.
// The Gamma-function closed form overflows near k = 170 and is never used here.

#include <cstddef>
#include <span>
#include <vector>

#include "fierisk/model.hpp"

namespace fierisk {

/// Coefficients c_0..c_M of a truncated lag series. Length is always M + 1 and
/// every entry is finite.
class CoefficientSeries {
 public:
  /// Throws Error(InvalidArgument) on an empty or non-finite coefficient list.
  explicit CoefficientSeries(std::vector<double> coeffs);

  std::size_t truncation_order() const noexcept { return coeffs_.size() - 1; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double operator[](std::size_t k) const { return coeffs_[k]; }

 private:
  std::vector<double> coeffs_;
};

inline constexpr std::size_t kDefaultSimulationTruncation = 50'000;
inline constexpr std::size_t kDefaultFilterTruncation = 1'000;

CoefficientSeries frac_diff_coeffs(double d, std::size_t order);

/// Reciprocal 1/b(L) truncated at `order`. Throws Error(SingularSeries) if b_0 == 0.
CoefficientSeries series_invert(const CoefficientSeries& b, std::size_t order);

/// Cauchy product truncated at `order`; missing high-order terms count as zero.
CoefficientSeries series_mul(const CoefficientSeries& a, const CoefficientSeries& b,
                             std::size_t order);

/// xi_k of 1 / (beta(L) (1 - L)^d), beta(L) = 1 - sum beta_j L^j.
CoefficientSeries inverse_operator_coeffs(std::span<const double> beta, double d,
                                          std::size_t order);

/// lambda_k of alpha(L) / (beta(L) (1 - L)^d); lambda_0 = 1.
CoefficientSeries lambda_coeffs(const FiegarchSpec& spec, std::size_t order);

}  // namespace fierisk
