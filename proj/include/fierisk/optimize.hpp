#pragma once

// Unconstrained minimization: BFGS on central-difference gradients with an
// Armijo backtracking line search, falling back to Nelder-Mead when the line
// search stalls. Objectives may return +inf (or NaN) to reject a point.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fierisk {

using Objective = std::function<double(std::span<const double>)>;

struct OptimizeOptions {
  std::size_t max_iterations = 500;
  double gradient_tolerance = 1e-5;
  double max_step = 1.0;              // cap on the Euclidean length of a quasi-Newton step
  double relative_step = 6e-6;        // finite-difference step, scaled by max(1, |x_i|)
  std::size_t nelder_mead_iterations = 2000;
  double nelder_mead_tolerance = 1e-12;
};

struct OptimizeResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  double gradient_norm = 0.0;  // max-abs component at x
  bool converged = false;
  bool used_fallback = false;
  std::vector<double> trace;  // best objective after each iteration, nonincreasing
};

/// Central differences; falls back to a one-sided difference where one side is rejected.
/// Returns false if neither side is finite for some coordinate.
bool numerical_gradient(const Objective& f, std::span<const double> x, double fx,
                        double relative_step, std::vector<double>& grad,
                        std::size_t* evaluations = nullptr);

OptimizeResult nelder_mead(const Objective& f, std::vector<double> x0,
                           const OptimizeOptions& options = {});

OptimizeResult minimize(const Objective& f, std::vector<double> x0,
                        const OptimizeOptions& options = {});

}  // namespace fierisk
