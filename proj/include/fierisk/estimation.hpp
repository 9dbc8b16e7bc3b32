#pragma once

// Gaussian quasi-maximum-likelihood fitting of ARMA(p1,q1)-FIEGARCH(p2,d,q2)
// models and information-criterion model selection.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fierisk/arma.hpp"
#include "fierisk/fracdiff.hpp"
#include "fierisk/model.hpp"
#include "fierisk/optimize.hpp"

namespace fierisk {

struct ModelOrders {
  std::size_t p1 = 0;  // AR
  std::size_t q1 = 0;  // MA
  std::size_t p2 = 0;  // alpha lags
  std::size_t q2 = 1;  // beta lags
  bool fractional = true;  // false fixes d = 0 (EGARCH)
  bool fit_mean = true;

  std::size_t parameter_count() const noexcept;
  std::string label() const;
  friend bool operator==(const ModelOrders&, const ModelOrders&) = default;
};

inline constexpr std::size_t kMaxVolatilityOrder = 5;

struct JointSpec {
  ArmaSpec arma;
  FiegarchSpec fiegarch;
};

struct FitConfig {
  OptimizeOptions optimizer;
  std::size_t truncation = kDefaultFilterTruncation;
  /// Leading observations left out of the likelihood; default max(20, p1+q1+p2+q2+1).
  std::optional<std::size_t> skip;
};

struct FitResult {
  FitResult(JointSpec s, ModelOrders o) : spec(std::move(s)), orders(o) {}

  JointSpec spec;
  ModelOrders orders;
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  std::size_t k = 0;
  std::size_t n_used = 0;
  std::size_t skip = 0;
  std::size_t truncation = 0;
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  double gradient_norm = 0.0;
  bool used_fallback = false;
  std::vector<double> trace;  // best mean negative log-likelihood per iteration (standardized scale)
};

/// -1/2 sum_{t >= skip} [ln 2 pi + ln sigma_t^2 + X_t^2 / sigma_t^2]; -inf when
/// |ln sigma_t^2| exceeds 700 at any used t.
double qmle_loglik(const JointSpec& spec, std::span<const double> r,
                   std::size_t truncation = kDefaultFilterTruncation, std::size_t skip = 0);
double qmle_loglik(const ArmaSpec& arma, const ZivotWangSpec& zw, std::span<const double> r,
                   std::size_t truncation = kDefaultFilterTruncation, std::size_t skip = 0);

/// Z_t = X_t / sigma_t for the joint model.
std::vector<double> standardized_residuals(const JointSpec& spec, std::span<const double> r,
                                           std::size_t truncation = kDefaultFilterTruncation);

FitResult fit(const ModelOrders& orders, std::span<const double> r, const FitConfig& config = {});

struct SelectionFailure {
  ModelOrders orders;
  std::string message;
};

struct Selection {
  std::vector<FitResult> ranked;  // BIC, then AIC, then fewer parameters, then candidate index
  std::vector<SelectionFailure> failures;
};

/// Fits every candidate (in parallel when `threads` > 1) and ranks the successes.
/// Throws Error(Fit) if every candidate fails.
Selection model_select(std::span<const ModelOrders> candidates, std::span<const double> r,
                       const FitConfig& config = {}, std::size_t threads = 0);

struct PortmanteauTest {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t lags = 0;
};

/// Ljung-Box Q on `series` (pass squared standardized residuals for the ARCH diagnostic).
PortmanteauTest ljung_box(std::span<const double> series, std::size_t lags);

/// Map between unconstrained optimizer coordinates and model parameters.
class ParameterMap {
 public:
  explicit ParameterMap(ModelOrders orders) : orders_(orders) {}

  std::size_t size() const noexcept { return orders_.parameter_count(); }
  const ModelOrders& orders() const noexcept { return orders_; }

  /// nullopt when the coordinates decode to an inadmissible model.
  std::optional<JointSpec> decode(std::span<const double> u) const;
  /// Throws Error(Domain) when the spec lies outside the transform's range.
  std::vector<double> encode(const JointSpec& spec) const;

 private:
  ModelOrders orders_;
};

}  // namespace fierisk
