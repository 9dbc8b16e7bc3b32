#pragma once

// Conditional-mean equation
//
//   r_t - mu = sum_i phi_i (r_{t-i} - mu) + X_t + sum_j vartheta_j X_{t-j}
//
// Pre-sample observations equal mu and pre-sample innovations are zero.

#include <cstddef>
#include <span>
#include <vector>

namespace fierisk {

inline constexpr std::size_t kMaxArmaOrder = 5;

struct ArmaParams {
  double mean = 0.0;
  std::vector<double> ar;  // phi_1..phi_p1
  std::vector<double> ma;  // vartheta_1..vartheta_q1
};

/// Causal and invertible ARMA(p1, q1) with p1, q1 <= kMaxArmaOrder.
class ArmaSpec {
 public:
  ArmaSpec() = default;
  explicit ArmaSpec(ArmaParams params);

  const ArmaParams& params() const noexcept { return params_; }
  double mean() const noexcept { return params_.mean; }
  std::span<const double> ar() const noexcept { return params_.ar; }
  std::span<const double> ma() const noexcept { return params_.ma; }
  std::size_t p() const noexcept { return params_.ar.size(); }
  std::size_t q() const noexcept { return params_.ma.size(); }
  bool trivial() const noexcept { return params_.ar.empty() && params_.ma.empty(); }

 private:
  ArmaParams params_;
};

/// Innovations X_t of r.
std::vector<double> arma_filter(const ArmaSpec& spec, std::span<const double> r);

/// Inverse of arma_filter: rebuilds r from innovations.
std::vector<double> arma_synthesize(const ArmaSpec& spec, std::span<const double> innovations);

/// r_{n+1..n+h} with future innovations set to zero.
std::vector<double> arma_forecast(const ArmaSpec& spec, std::span<const double> r,
                                  std::span<const double> innovations, std::size_t h);

}  // namespace fierisk
