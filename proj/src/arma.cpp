#include "fierisk/arma.hpp"

#include <cmath>
#include <string>

#include "fierisk/error.hpp"
#include "fierisk/polynomial.hpp"

namespace fierisk {
namespace {

constexpr std::string_view kModule = "arma";

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw Error(ErrorKind::InvalidArgument, kModule, std::string("non-finite ") + what);
    }
  }
}

}  // namespace

ArmaSpec::ArmaSpec(ArmaParams params) : params_(std::move(params)) {
  if (params_.ar.size() > kMaxArmaOrder || params_.ma.size() > kMaxArmaOrder) {
    throw Error(ErrorKind::InvalidArgument, kModule, "ARMA orders above 5 are not supported");
  }
  if (!std::isfinite(params_.mean)) throw Error(ErrorKind::Domain, kModule, "non-finite mean");
  check_finite(params_.ar, "AR coefficient");
  check_finite(params_.ma, "MA coefficient");
  if (!is_stable_ar(params_.ar)) {
    throw Error(ErrorKind::NonInvertible, kModule, "AR polynomial has a root on or inside the unit circle");
  }
  if (!is_stable_ma(params_.ma)) {
    throw Error(ErrorKind::NonInvertible, kModule, "MA polynomial has a root on or inside the unit circle");
  }
}

std::vector<double> arma_filter(const ArmaSpec& spec, std::span<const double> r) {
  check_finite(r, "return");
  const double mu = spec.mean();
  const auto phi = spec.ar();
  const auto theta = spec.ma();
  std::vector<double> x(r.size());
  for (std::size_t t = 0; t < r.size(); ++t) {
    double v = r[t] - mu;
    for (std::size_t i = 0; i < phi.size() && i < t; ++i) v -= phi[i] * (r[t - 1 - i] - mu);
    for (std::size_t j = 0; j < theta.size() && j < t; ++j) v -= theta[j] * x[t - 1 - j];
    x[t] = v;
  }
  return x;
}

std::vector<double> arma_synthesize(const ArmaSpec& spec, std::span<const double> innovations) {
  check_finite(innovations, "innovation");
  const double mu = spec.mean();
  const auto phi = spec.ar();
  const auto theta = spec.ma();
  std::vector<double> r(innovations.size());
  for (std::size_t t = 0; t < r.size(); ++t) {
    double v = mu + innovations[t];
    for (std::size_t i = 0; i < phi.size() && i < t; ++i) v += phi[i] * (r[t - 1 - i] - mu);
    for (std::size_t j = 0; j < theta.size() && j < t; ++j) v += theta[j] * innovations[t - 1 - j];
    r[t] = v;
  }
  return r;
}

std::vector<double> arma_forecast(const ArmaSpec& spec, std::span<const double> r,
                                  std::span<const double> innovations, std::size_t h) {
  if (h == 0) throw Error(ErrorKind::InvalidArgument, kModule, "forecast horizon must be >= 1");
  if (r.size() != innovations.size()) {
    throw Error(ErrorKind::InvalidArgument, kModule, "returns and innovations differ in length");
  }
  const double mu = spec.mean();
  const auto phi = spec.ar();
  const auto theta = spec.ma();
  const std::size_t n = r.size();

  // extended[s] for s < n is observed, s >= n forecast; innovations beyond n are zero
  std::vector<double> extended(r.begin(), r.end());
  extended.resize(n + h);
  auto obs = [&](std::size_t s, std::size_t lag) { return s >= lag ? extended[s - lag] - mu : 0.0; };
  auto innov = [&](std::size_t s, std::size_t lag) {
    return (s >= lag && s - lag < n) ? innovations[s - lag] : 0.0;
  };
  for (std::size_t s = n; s < n + h; ++s) {
    double v = mu;
    for (std::size_t i = 0; i < phi.size(); ++i) v += phi[i] * obs(s, i + 1);
    for (std::size_t j = 0; j < theta.size(); ++j) v += theta[j] * innov(s, j + 1);
    extended[s] = v;
  }
  return {extended.begin() + static_cast<std::ptrdiff_t>(n), extended.end()};
}

}  // namespace fierisk
