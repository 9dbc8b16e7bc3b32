#include "fierisk/fiegarch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fierisk/error.hpp"

namespace fierisk {
namespace {

constexpr std::string_view kModule = "fiegarch";

double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

// Shock term u_s built from the standardized shocks z_s, z_{s-1}, ...
struct GShock {
  double theta, gamma, e_abs;
  double presample() const { return 0.0; }
  double operator()(const std::vector<double>& z, std::size_t s) const {
    return g_transform(z[s], theta, gamma, e_abs);
  }
};

struct ZivotWangShock {
  double a;
  std::span<const double> psi, gamma;
  double e_abs;
  double presample() const {
    double c = a;
    for (double v : psi) c += v * e_abs;
    return c;
  }
  double operator()(const std::vector<double>& z, std::size_t s) const {
    double u = a;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      if (i <= s) {
        const double zi = z[s - i];
        u += psi[i] * std::abs(zi) + gamma[i] * zi;
      } else {
        u += psi[i] * e_abs;
      }
    }
    return u;
  }
};

// Drives the shared recursion for `length` steps. `draw(t, sigma)` returns the
// standardized shock at step t given sigma_t (a fresh normal in simulation,
// x_t / sigma_t in filtering).
template <typename Shock, typename Draw>
void run_recursion(double level, const CoefficientSeries& weights, const Shock& shock,
                   std::size_t length, std::vector<double>& log_sigma2, std::vector<double>& z,
                   Draw&& draw) {
  const auto w = weights.coeffs();
  const std::size_t order = weights.truncation_order();
  const double pre = shock.presample();

  // suffix[k] = sum_{j >= k} w_j, only needed when pre-sample shocks are nonzero
  std::vector<double> suffix;
  if (pre != 0.0) {
    suffix.assign(order + 2, 0.0);
    for (std::size_t k = order + 1; k-- > 0;) suffix[k] = suffix[k + 1] + w[k];
  }

  // u stored reversed so the lag sum reads contiguous memory
  std::vector<double> u_rev(length, 0.0);
  log_sigma2.assign(length, 0.0);
  z.assign(length, 0.0);

  for (std::size_t t = 0; t < length; ++t) {
    double value = level;
    if (t > 0) {
      const std::size_t terms = std::min(order, t - 1) + 1;
      value += dot(w.data(), u_rev.data() + (length - t), terms);
    }
    if (pre != 0.0 && t <= order) value += pre * suffix[t];
    log_sigma2[t] = value;
    z[t] = draw(t, std::exp(0.5 * value));
    u_rev[length - 1 - t] = shock(z, t);
  }
}

void check_length(const SimulationOptions& o) {
  if (o.n == 0) throw Error(ErrorKind::InvalidArgument, kModule, "n must be >= 1");
  if (o.n + o.burn_in > o.max_length) {
    throw Error(ErrorKind::InvalidArgument, kModule, "n + burn_in exceeds the configured cap");
  }
}

template <typename Shock>
SimulatedPath simulate_with(double level, const CoefficientSeries& weights, const Shock& shock,
                            const SimulationOptions& options, Rng& rng) {
  const std::size_t total = options.n + options.burn_in;
  std::vector<double> log_s2, z;
  run_recursion(level, weights, shock, total, log_s2, z,
                [&](std::size_t, double) { return rng.normal(); });

  SimulatedPath path;
  path.n = options.n;
  path.seed = rng.record();
  const auto first = static_cast<std::ptrdiff_t>(options.burn_in);
  path.log_sigma2.assign(log_s2.begin() + first, log_s2.end());
  path.z.assign(z.begin() + first, z.end());
  path.sigma2.resize(options.n);
  path.x.resize(options.n);
  for (std::size_t t = 0; t < options.n; ++t) {
    path.sigma2[t] = std::exp(path.log_sigma2[t]);
    path.x[t] = std::sqrt(path.sigma2[t]) * path.z[t];
  }
  return path;
}

template <typename Shock>
FilteredVolatility filter_with(double level, const CoefficientSeries& weights, const Shock& shock,
                               std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, kModule, "non-finite input");
  }
  FilteredVolatility out;
  out.truncation = weights.truncation_order();
  run_recursion(level, weights, shock, x.size(), out.log_sigma2, out.residuals,
                [&](std::size_t t, double sigma) { return x[t] / sigma; });
  out.sigma2.resize(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) out.sigma2[t] = std::exp(out.log_sigma2[t]);
  return out;
}

GShock g_shock(const FiegarchSpec& spec) {
  return GShock{spec.theta(), spec.gamma(), spec.expected_abs_z()};
}

ZivotWangShock zw_shock(const ZivotWangSpec& spec) {
  const auto& p = spec.params();
  return ZivotWangShock{p.a, p.psi, p.gamma_zw, spec.expected_abs_z()};
}

}  // namespace

SimulatedPath simulate(const FiegarchSpec& spec, const SimulationOptions& options, Rng& rng) {
  check_length(options);
  const auto lambda = lambda_coeffs(spec, options.truncation);
  return simulate_with(spec.omega(), lambda, g_shock(spec), options, rng);
}

SimulatedPath simulate(const FiegarchSpec& spec, const SimulationOptions& options, SeedRecord seed) {
  Rng rng = Rng::from_stream(seed.seed, seed.stream);
  return simulate(spec, options, rng);
}

SimulatedPath simulate_zw(const ZivotWangSpec& spec, const SimulationOptions& options, Rng& rng) {
  check_length(options);
  const auto& p = spec.params();
  const auto xi = inverse_operator_coeffs(p.beta, p.d, options.truncation);
  return simulate_with(p.omega, xi, zw_shock(spec), options, rng);
}

SimulatedPath simulate_zw(const ZivotWangSpec& spec, const SimulationOptions& options,
                          SeedRecord seed) {
  Rng rng = Rng::from_stream(seed.seed, seed.stream);
  return simulate_zw(spec, options, rng);
}

FilteredVolatility filter_volatility(const FiegarchSpec& spec, std::span<const double> x,
                                     std::size_t truncation) {
  return filter_with(spec.omega(), lambda_coeffs(spec, truncation), g_shock(spec), x);
}

FilteredVolatility filter_volatility(const FiegarchSpec& spec, const CoefficientSeries& lambda,
                                     std::span<const double> x) {
  return filter_with(spec.omega(), lambda, g_shock(spec), x);
}

FilteredVolatility filter_volatility_zw(const ZivotWangSpec& spec, std::span<const double> x,
                                        std::size_t truncation) {
  const auto& p = spec.params();
  return filter_with(p.omega, inverse_operator_coeffs(p.beta, p.d, truncation), zw_shock(spec), x);
}

std::vector<double> forecast_volatility(const FiegarchSpec& spec, const FilteredVolatility& history,
                                        std::size_t h, std::optional<std::size_t> truncation) {
  if (h == 0) throw Error(ErrorKind::InvalidArgument, kModule, "forecast horizon must be >= 1");
  if (truncation && *truncation != history.truncation) {
    throw Error(ErrorKind::InvalidArgument, kModule,
                "forecast truncation differs from the filtering truncation");
  }
  const std::size_t n = history.residuals.size();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, kModule, "empty filtered history");

  const auto lambda = lambda_coeffs(spec, history.truncation);
  const std::size_t order = lambda.truncation_order();
  const double e_abs = spec.expected_abs_z();

  std::vector<double> g(n);
  for (std::size_t s = 0; s < n; ++s) {
    g[s] = g_transform(history.residuals[s], spec.theta(), spec.gamma(), e_abs);
  }

  std::vector<double> out(h);
  for (std::size_t step = 1; step <= h; ++step) {
    // target index T = n - 1 + step (0-based); lag k reaches g_{T-1-k}, known for k >= step - 1
    const std::size_t target = n - 1 + step;
    double value = spec.omega();
    for (std::size_t k = step - 1; k <= order && k + 1 <= target; ++k) {
      value += lambda[k] * g[target - 1 - k];
    }
    out[step - 1] = std::exp(value);
  }
  return out;
}

}  // namespace fierisk
