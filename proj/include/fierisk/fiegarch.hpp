#pragma once

// Simulation, volatility filtering and forecasting for FIEGARCH processes.
//
// Both the g-form and the intercept/shock form share one recursion:
//
//   ln sigma_t^2 = level + sum_{k=0}^{min(M, t-1)} w_k u_{t-1-k}
//
// with (w, u) = (lambda, g(Z)) or (xi, a + sum_i psi_i |Z| + gamma_i Z).
// Pre-sample shocks are set to their means (Z = 0, |Z| = E|Z|), which makes
// every pre-sample g term zero.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fierisk/fracdiff.hpp"
#include "fierisk/model.hpp"
#include "fierisk/rng.hpp"

namespace fierisk {

struct SimulatedPath {
  std::vector<double> x;
  std::vector<double> sigma2;
  std::vector<double> log_sigma2;
  std::vector<double> z;
  std::size_t n = 0;
  SeedRecord seed;
};

struct SimulationOptions {
  std::size_t n = 2000;
  std::size_t burn_in = 2000;
  std::size_t truncation = kDefaultSimulationTruncation;
  std::size_t max_length = 10'000'000;
};

SimulatedPath simulate(const FiegarchSpec& spec, const SimulationOptions& options, Rng& rng);
SimulatedPath simulate(const FiegarchSpec& spec, const SimulationOptions& options, SeedRecord seed);

SimulatedPath simulate_zw(const ZivotWangSpec& spec, const SimulationOptions& options, Rng& rng);
SimulatedPath simulate_zw(const ZivotWangSpec& spec, const SimulationOptions& options,
                          SeedRecord seed);

/// Output of the likelihood-side recursion on observed innovations x.
struct FilteredVolatility {
  std::vector<double> sigma2;
  std::vector<double> log_sigma2;
  std::vector<double> residuals;  // x_t / sigma_t
  std::size_t truncation = 0;
};

FilteredVolatility filter_volatility(const FiegarchSpec& spec, std::span<const double> x,
                                     std::size_t truncation = kDefaultFilterTruncation);

/// Same recursion with precomputed lambda; used by the likelihood hot path.
FilteredVolatility filter_volatility(const FiegarchSpec& spec, const CoefficientSeries& lambda,
                                     std::span<const double> x);

FilteredVolatility filter_volatility_zw(const ZivotWangSpec& spec, std::span<const double> x,
                                        std::size_t truncation = kDefaultFilterTruncation);

/// sigma^2_{n+1..n+h} with future g values replaced by their mean 0. The
/// filter's truncation is reused; passing a different `truncation` is an error.
std::vector<double> forecast_volatility(const FiegarchSpec& spec, const FilteredVolatility& history,
                                        std::size_t h,
                                        std::optional<std::size_t> truncation = std::nullopt);

}  // namespace fierisk
