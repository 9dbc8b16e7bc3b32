#pragma once

// VaR, Expected Shortfall and MaxLoss under the empirical, Normal,
// RiskMetrics (EWMA) and econometric (EGARCH / FIEGARCH) approaches.
//
// VaR and ES are reported in loss units (positive = loss). MaxLoss is
// reported as a signed portfolio log-return, so a loss is negative.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fierisk/estimation.hpp"

namespace fierisk {

enum class RiskMeasure { VaR, ES, MaxLoss };
enum class Approach { Empirical, Normal, RiskMetrics, Egarch, Fiegarch, MaxLoss };

std::string_view to_string(RiskMeasure m) noexcept;
std::string_view to_string(Approach a) noexcept;
std::optional<Approach> parse_approach(std::string_view name) noexcept;

inline constexpr std::string_view kLossPositive = "loss-positive";
inline constexpr std::string_view kReturnSigned = "return-signed-loss-negative";

struct RiskEstimate {
  RiskMeasure measure = RiskMeasure::VaR;
  double level = 0.95;
  std::size_t horizon = 1;
  double value = 0.0;
  Approach approach = Approach::Normal;
  std::string_view sign_convention = kLossPositive;
  std::optional<std::vector<double>> scenario;
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kMinEmpiricalLength = 20;
inline constexpr double kDefaultEwmaLambda = 0.94;
inline constexpr std::size_t kDefaultEwmaWindow = 30;

/// Smallest sample value l with F_n(l) >= p (order statistic ceil(n p)).
RiskEstimate var_empirical(std::span<const double> losses, double p,
                           std::size_t min_length = kMinEmpiricalLength);
/// Mean of the losses at or above the empirical VaR.
RiskEstimate es_empirical(std::span<const double> losses, double p,
                          std::size_t min_length = kMinEmpiricalLength);

/// mu * (h if mean_per_period else 1) + Phi^{-1}(p) sqrt(h) sigma.
RiskEstimate var_normal(double mu, double sigma, double p, std::size_t h = 1,
                        bool mean_per_period = false);
/// mu + sqrt(h) sigma phi(Phi^{-1}(p)) / (1 - p), with the same mean scaling.
RiskEstimate es_normal(double mu, double sigma, double p, std::size_t h = 1,
                       bool mean_per_period = false);

struct EwmaState {
  double lambda = kDefaultEwmaLambda;
  double sigma2 = 0.0;
};

struct EwmaCovState {
  double lambda = kDefaultEwmaLambda;
  Eigen::MatrixXd cov;
};

EwmaState ewma_update(const EwmaState& state, double r);
EwmaCovState ewma_update(const EwmaCovState& state, std::span<const double> r);

/// sigma^2_{n+1}: sample variance of the first `window` returns, then one
/// update per return.
EwmaState ewma_filter(std::span<const double> r, double lambda = kDefaultEwmaLambda,
                      std::size_t window = kDefaultEwmaWindow);
/// Multivariate counterpart on an n x m return matrix.
EwmaCovState ewma_filter(const Eigen::MatrixXd& returns, double lambda = kDefaultEwmaLambda,
                         std::size_t window = kDefaultEwmaWindow);

RiskEstimate var_riskmetrics(std::span<const double> r, double p, std::size_t h = 1,
                             double lambda = kDefaultEwmaLambda,
                             std::size_t window = kDefaultEwmaWindow);
RiskEstimate es_riskmetrics(std::span<const double> r, double p, std::size_t h = 1,
                            double lambda = kDefaultEwmaLambda,
                            std::size_t window = kDefaultEwmaWindow);
/// Portfolio VaR / ES from the EWMA covariance: sigma_P^2 = a' Sigma a.
RiskEstimate var_riskmetrics(const Eigen::MatrixXd& returns, std::span<const double> weights,
                             double p, std::size_t h = 1, double lambda = kDefaultEwmaLambda,
                             std::size_t window = kDefaultEwmaWindow);
RiskEstimate es_riskmetrics(const Eigen::MatrixXd& returns, std::span<const double> weights,
                            double p, std::size_t h = 1, double lambda = kDefaultEwmaLambda,
                            std::size_t window = kDefaultEwmaWindow);

struct ConditionalForecast {
  std::vector<double> mean;    // r_hat_{n+1..n+h}
  std::vector<double> sigma2;  // sigma_hat^2_{n+1..n+h}
};

ConditionalForecast forecast(const JointSpec& spec, std::span<const double> r, std::size_t h,
                             std::size_t truncation = kDefaultFilterTruncation);

/// -r_hat_{n+h} + Phi^{-1}(p) sigma_hat_{n+h}. Unconverged fits throw unless
/// allow_unconverged is set, in which case a warning is attached.
RiskEstimate var_econometric(const FitResult& fit, std::span<const double> r, double p,
                             std::size_t h = 1, bool allow_unconverged = false);
RiskEstimate es_econometric(const FitResult& fit, std::span<const double> r, double p,
                            std::size_t h = 1, bool allow_unconverged = false);
/// Same with a known model (no fitting).
RiskEstimate var_econometric(const JointSpec& spec, std::span<const double> r, double p,
                             std::size_t h = 1, std::size_t truncation = kDefaultFilterTruncation);
RiskEstimate es_econometric(const JointSpec& spec, std::span<const double> r, double p,
                            std::size_t h = 1, std::size_t truncation = kDefaultFilterTruncation);

/// MaxLoss = -sqrt(c_p) sqrt(a' Sigma a) with c_p the chi-square(m) p-quantile;
/// scenario Z* = -(sqrt(c_p) / sqrt(a' Sigma a)) Sigma a.
RiskEstimate maxloss(std::span<const double> weights, const Eigen::MatrixXd& cov, double p);

struct PortfolioSpec {
  std::vector<double> weights;  // sums to 1
  double v0 = 1.0;
  Eigen::MatrixXd returns;  // n x m log-returns
  bool normalized = true;   // V_{t-1} = 1
};

void validate(const PortfolioSpec& spec);

/// V_0..V_n with V_t = V_0 sum_i a_i exp(r_{i,1} + ... + r_{i,t}).
std::vector<double> portfolio_values(const PortfolioSpec& spec);

/// L_t = -V_{t-1} sum_i a_i r_{i,t} for row t (0-based), t = 0..n-1.
double portfolio_loss(const PortfolioSpec& spec, std::size_t t);
std::vector<double> portfolio_losses(const PortfolioSpec& spec);

/// sum_i a_i r_{i,t} for every row.
std::vector<double> portfolio_returns(const Eigen::MatrixXd& returns, std::span<const double> weights);

}  // namespace fierisk
