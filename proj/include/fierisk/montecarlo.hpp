#pragma once

// Replication harness: simulate a path of length n, estimate VaR at
// t + 1 = n - holdout + 1 from the first n - holdout points under each
// approach, and aggregate means and mse against the known volatility.
//
// Replication i of model m draws from stream (m * replications + i) of the
// master seed; streams are 2^128 draws apart. forecast_experiment uses the
// same layout after one long jump.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fierisk/estimation.hpp"
#include "fierisk/fiegarch.hpp"
#include "fierisk/model.hpp"
#include "fierisk/risk.hpp"

namespace fierisk {

inline constexpr std::uint64_t kDefaultMasterSeed = 12345;
inline constexpr std::size_t kDefaultReplications = 200;
inline constexpr std::size_t kFullReplications = 1000;

struct ExperimentPlan {
  std::vector<NamedModel> models = reference_models();
  std::size_t n = 2000;
  std::size_t replications = kDefaultReplications;
  std::size_t holdout = 10;
  std::vector<double> levels{0.95, 0.99};
  std::vector<Approach> approaches{Approach::Empirical, Approach::Normal, Approach::RiskMetrics,
                                   Approach::Egarch, Approach::Fiegarch};
  std::uint64_t master_seed = kDefaultMasterSeed;
  SimulationOptions simulation{};
  FitConfig fit{};
  double lambda = kDefaultEwmaLambda;
  std::size_t horizons = 10;  // forecast_experiment only
  bool oracle = false;        // econometric arms use the generating parameters
  std::size_t threads = 0;    // 0 = hardware concurrency
};

void validate(const ExperimentPlan& plan);

/// (1/k) sum e_i^2.
double mse(std::span<const double> errors);

struct CellSummary {
  Approach approach = Approach::Normal;
  double level = 0.95;
  std::size_t count = 0;       // replications entering the averages
  std::size_t failures = 0;    // excluded (fit error or non-finite estimate)
  std::size_t unconverged = 0; // included, optimizer reported converged = false
  double mean = 0.0;
  double mse_true = 0.0;
  double mse_realized = 0.0;
};

struct ModelSummary {
  std::string name;
  std::vector<double> mean_true_var;  // per level
  double mean_realized_return = 0.0;
  std::vector<CellSummary> cells;     // approach-major, level-minor
  bool unreliable = false;            // some arm failed in more than 10% of replications
};

struct ExperimentReport {
  ExperimentPlan plan;
  std::vector<ModelSummary> models;
};

ExperimentReport run_experiment(const ExperimentPlan& plan);

struct ForecastCell {
  std::size_t h = 1;
  std::size_t count = 0;
  double mse_sigma = 0.0;  // (sigma_{t+h} - sigma_hat_{t+h})^2
  double mse_x2 = 0.0;     // (X_{t+h}^2 - sigma_hat^2_{t+h})^2
  double mean_sigma = 0.0;
  double mean_sigma_hat = 0.0;
};

struct ForecastSummary {
  std::string name;
  std::size_t failures = 0;
  std::size_t unconverged = 0;
  std::vector<ForecastCell> cells;
};

struct ForecastReport {
  ExperimentPlan plan;
  std::vector<ForecastSummary> models;
};

ForecastReport forecast_experiment(const ExperimentPlan& plan);

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware concurrency).
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace fierisk
