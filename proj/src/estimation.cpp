#include "fierisk/estimation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>

#include "fierisk/error.hpp"
#include "fierisk/fiegarch.hpp"
#include "fierisk/polynomial.hpp"
#include "fierisk/special.hpp"

namespace fierisk {
namespace {

constexpr std::string_view kModule = "estimation";
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSigmaCap = 700.0;
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

double gaussian_loglik(std::span<const double> x, std::span<const double> log_sigma2,
                       std::size_t skip) {
  double sum = 0.0;
  for (std::size_t t = skip; t < x.size(); ++t) {
    const double ls = log_sigma2[t];
    if (!(std::abs(ls) <= kLogSigmaCap)) return -kInf;
    sum += kLog2Pi + ls + x[t] * x[t] * std::exp(-ls);
  }
  return -0.5 * sum;
}

void check_series(std::span<const double> r) {
  for (double v : r) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, kModule, "non-finite return");
  }
}

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

std::vector<double> tanh_all(std::span<const double> u) {
  std::vector<double> out(u.size());
  std::transform(u.begin(), u.end(), out.begin(), [](double v) { return std::tanh(v); });
  return out;
}

std::vector<double> atanh_all(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(std::abs(v[i]) < 1.0)) {
      throw Error(ErrorKind::Domain, kModule, "partial autocorrelation outside (-1, 1)");
    }
    out[i] = std::atanh(v[i]);
  }
  return out;
}

std::vector<double> negate(std::vector<double> v) {
  for (double& x : v) x = -x;
  return v;
}

double sample_mean(std::span<const double> r) {
  return std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
}

double sample_variance(std::span<const double> r) {
  const double m = sample_mean(r);
  double s = 0.0;
  for (double v : r) s += (v - m) * (v - m);
  return s / static_cast<double>(r.size() > 1 ? r.size() - 1 : 1);
}

// Least squares fit of y on the columns of X; empty on rank deficiency.
std::optional<Eigen::VectorXd> least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < x.cols()) return std::nullopt;
  return Eigen::VectorXd(qr.solve(y));
}

// Two-stage Hannan-Rissanen estimate on demeaned data; shrinks toward zero
// until the result is causal and invertible.
ArmaParams hannan_rissanen(std::span<const double> y, std::size_t p, std::size_t q, double mean) {
  ArmaParams out;
  out.mean = mean;
  out.ar.assign(p, 0.0);
  out.ma.assign(q, 0.0);
  if (p == 0 && q == 0) return out;

  const std::size_t n = y.size();
  std::vector<double> c(n);
  for (std::size_t t = 0; t < n; ++t) c[t] = y[t] - mean;

  // long autoregression order for the first stage
  const std::size_t m = q == 0 ? 0
      : std::min<std::size_t>(std::max<std::size_t>(p + q + 5, static_cast<std::size_t>(
                                  std::ceil(2.0 * std::log(static_cast<double>(n))))),
                              n / 4);
  std::vector<double> resid(c);
  if (q > 0) {
    if (m == 0 || n <= 2 * m) return out;
    Eigen::MatrixXd x(n - m, m);
    Eigen::VectorXd rhs(n - m);
    for (std::size_t t = m; t < n; ++t) {
      rhs(t - m) = c[t];
      for (std::size_t j = 0; j < m; ++j) x(t - m, j) = c[t - 1 - j];
    }
    const auto coef = least_squares(x, rhs);
    if (!coef) return out;
    std::fill(resid.begin(), resid.end(), 0.0);
    for (std::size_t t = m; t < n; ++t) {
      double v = c[t];
      for (std::size_t j = 0; j < m; ++j) v -= (*coef)(j) * c[t - 1 - j];
      resid[t] = v;
    }
  }

  const std::size_t start = std::max(p, q) + m;
  if (n <= start + p + q + 10) return out;
  Eigen::MatrixXd x(n - start, p + q);
  Eigen::VectorXd rhs(n - start);
  for (std::size_t t = start; t < n; ++t) {
    rhs(t - start) = c[t];
    for (std::size_t i = 0; i < p; ++i) x(t - start, i) = c[t - 1 - i];
    for (std::size_t j = 0; j < q; ++j) x(t - start, p + j) = resid[t - 1 - j];
  }
  const auto coef = least_squares(x, rhs);
  if (!coef) return out;
  std::vector<double> ar(p), ma(q);
  for (std::size_t i = 0; i < p; ++i) ar[i] = (*coef)(i);
  for (std::size_t j = 0; j < q; ++j) ma[j] = (*coef)(p + j);

  for (int attempt = 0; attempt < 30; ++attempt) {
    const bool ok = is_stable_ar(ar) && is_stable_ma(ma) &&
                    std::all_of(ar.begin(), ar.end(), [](double v) { return std::isfinite(v); }) &&
                    std::all_of(ma.begin(), ma.end(), [](double v) { return std::isfinite(v); });
    if (ok) {
      out.ar = ar;
      out.ma = ma;
      return out;
    }
    for (double& v : ar) v *= 0.8;
    for (double& v : ma) v *= 0.8;
  }
  return out;
}

std::size_t default_skip(const ModelOrders& o) {
  return std::max<std::size_t>(20, o.p1 + o.q1 + o.p2 + o.q2 + 1);
}

void check_orders(const ModelOrders& o) {
  if (o.p1 > kMaxArmaOrder || o.q1 > kMaxArmaOrder) {
    throw Error(ErrorKind::InvalidArgument, kModule, "ARMA orders above 5 are not supported");
  }
  if (o.p2 > kMaxVolatilityOrder || o.q2 > kMaxVolatilityOrder) {
    throw Error(ErrorKind::InvalidArgument, kModule, "volatility orders above 5 are not supported");
  }
}

}  // namespace

std::size_t ModelOrders::parameter_count() const noexcept {
  return (fit_mean ? 1 : 0) + p1 + q1 + 3 + p2 + q2 + (fractional ? 1 : 0);
}

std::string ModelOrders::label() const {
  std::string s = "ARMA(" + std::to_string(p1) + "," + std::to_string(q1) + ")-";
  if (fractional) {
    s += "FIEGARCH(" + std::to_string(p2) + ",d," + std::to_string(q2) + ")";
  } else {
    s += "EGARCH(" + std::to_string(p2) + "," + std::to_string(q2) + ")";
  }
  return s;
}

std::optional<JointSpec> ParameterMap::decode(std::span<const double> u) const {
  if (u.size() != size()) {
    throw Error(ErrorKind::InvalidArgument, kModule, "coordinate vector has the wrong length");
  }
  const auto& o = orders_;
  std::size_t i = 0;
  ArmaParams arma;
  arma.mean = o.fit_mean ? u[i++] : 0.0;
  arma.ar = pacf_to_ar(tanh_all(u.subspan(i, o.p1)));
  i += o.p1;
  arma.ma = negate(pacf_to_ar(tanh_all(u.subspan(i, o.q1))));
  i += o.q1;

  FiegarchParams fp;
  fp.omega = u[i++];
  fp.theta = u[i++];
  fp.gamma = u[i++];
  fp.alpha.assign(u.begin() + static_cast<std::ptrdiff_t>(i),
                  u.begin() + static_cast<std::ptrdiff_t>(i + o.p2));
  i += o.p2;
  if (o.q2 <= 1) {
    fp.beta.assign(u.begin() + static_cast<std::ptrdiff_t>(i),
                   u.begin() + static_cast<std::ptrdiff_t>(i + o.q2));
  } else {
    fp.beta = pacf_to_ar(tanh_all(u.subspan(i, o.q2)));
  }
  i += o.q2;
  fp.d = o.fractional ? -0.5 + logistic(u[i++]) : 0.0;

  for (double v : u) {
    if (!std::isfinite(v)) return std::nullopt;
  }
  if (FiegarchSpec::validate(fp)) return std::nullopt;
  if (!is_stable_ar(arma.ar) || !is_stable_ma(arma.ma)) return std::nullopt;
  return JointSpec{ArmaSpec(std::move(arma)), FiegarchSpec(std::move(fp))};
}

std::vector<double> ParameterMap::encode(const JointSpec& spec) const {
  const auto& o = orders_;
  const auto& a = spec.arma;
  const auto& f = spec.fiegarch;
  if (a.p() != o.p1 || a.q() != o.q1 || f.p() != o.p2 || f.q() != o.q2) {
    throw Error(ErrorKind::InvalidArgument, kModule, "spec orders differ from the parameter map");
  }
  if (!o.fit_mean && a.mean() != 0.0) {
    throw Error(ErrorKind::Domain, kModule, "nonzero mean with the mean fixed at zero");
  }
  if (!o.fractional && f.d() != 0.0) {
    throw Error(ErrorKind::Domain, kModule, "nonzero d with d fixed at zero");
  }
  std::vector<double> u;
  u.reserve(size());
  if (o.fit_mean) u.push_back(a.mean());
  const auto ar_pacf = ar_to_pacf(a.ar());
  const std::vector<double> neg_ma = negate({a.ma().begin(), a.ma().end()});
  const auto ma_pacf = ar_to_pacf(neg_ma);
  if ((o.p1 > 0 && ar_pacf.empty()) || (o.q1 > 0 && ma_pacf.empty())) {
    throw Error(ErrorKind::Domain, kModule, "ARMA polynomial outside the stationary region");
  }
  for (double v : atanh_all(ar_pacf)) u.push_back(v);
  for (double v : atanh_all(ma_pacf)) u.push_back(v);
  u.push_back(f.omega());
  u.push_back(f.theta());
  u.push_back(f.gamma());
  for (double v : f.alpha()) u.push_back(v);
  if (o.q2 <= 1) {
    for (double v : f.beta()) u.push_back(v);
  } else {
    const auto pacf = ar_to_pacf(f.beta());
    if (pacf.empty()) throw Error(ErrorKind::Domain, kModule, "beta polynomial is not stable");
    for (double v : atanh_all(pacf)) u.push_back(v);
  }
  if (o.fractional) {
    const double x = f.d() + 0.5;
    u.push_back(std::log(x / (1.0 - x)));
  }
  return u;
}

double qmle_loglik(const JointSpec& spec, std::span<const double> r, std::size_t truncation,
                   std::size_t skip) {
  check_series(r);
  if (skip >= r.size()) throw Error(ErrorKind::InvalidArgument, kModule, "skip leaves no observations");
  const auto x = arma_filter(spec.arma, r);
  const auto filtered = filter_volatility(spec.fiegarch, x, truncation);
  return gaussian_loglik(x, filtered.log_sigma2, skip);
}

double qmle_loglik(const ArmaSpec& arma, const ZivotWangSpec& zw, std::span<const double> r,
                   std::size_t truncation, std::size_t skip) {
  check_series(r);
  if (skip >= r.size()) throw Error(ErrorKind::InvalidArgument, kModule, "skip leaves no observations");
  const auto x = arma_filter(arma, r);
  const auto filtered = filter_volatility_zw(zw, x, truncation);
  return gaussian_loglik(x, filtered.log_sigma2, skip);
}

std::vector<double> standardized_residuals(const JointSpec& spec, std::span<const double> r,
                                           std::size_t truncation) {
  const auto x = arma_filter(spec.arma, r);
  return filter_volatility(spec.fiegarch, x, truncation).residuals;
}

FitResult fit(const ModelOrders& orders, std::span<const double> r, const FitConfig& config) {
  check_orders(orders);
  check_series(r);
  const std::size_t k = orders.parameter_count();
  const std::size_t skip = config.skip.value_or(default_skip(orders));
  if (r.size() <= skip || r.size() - skip <= 10 * k) {
    throw Error(ErrorKind::InvalidArgument, kModule,
                "series too short: need more than 10 observations per parameter after the skip");
  }
  const double var = sample_variance(r);
  if (!(var > 0.0)) throw Error(ErrorKind::InvalidArgument, kModule, "series has zero variance");
  const double scale = std::sqrt(var);
  const double log_scale = std::log(scale);
  std::vector<double> y(r.size());
  for (std::size_t t = 0; t < r.size(); ++t) y[t] = r[t] / scale;

  // deterministic starting point
  ArmaParams arma0 = hannan_rissanen(y, orders.p1, orders.q1, orders.fit_mean ? sample_mean(y) : 0.0);
  const auto innov0 = arma_filter(ArmaSpec(arma0), y);
  FiegarchParams fp0;
  fp0.omega = std::log(std::max(sample_variance(innov0), 1e-12));
  fp0.theta = -0.1;
  fp0.gamma = 0.2;
  fp0.alpha.assign(orders.p2, orders.p2 ? 0.1 / static_cast<double>(orders.p2) : 0.0);
  fp0.beta.assign(orders.q2, orders.q2 ? 0.5 / static_cast<double>(orders.q2) : 0.0);
  fp0.d = orders.fractional ? 0.2 : 0.0;

  const ParameterMap map(orders);
  const auto x0 = map.encode(JointSpec{ArmaSpec(arma0), FiegarchSpec(fp0)});
  const std::size_t truncation = config.truncation;
  const double n_used = static_cast<double>(y.size() - skip);

  const Objective objective = [&](std::span<const double> u) {
    const auto spec = map.decode(u);
    if (!spec) return kInf;
    const auto x = arma_filter(spec->arma, y);
    const auto lambda = lambda_coeffs(spec->fiegarch, truncation);
    const auto filtered = filter_volatility(spec->fiegarch, lambda, x);
    const double ll = gaussian_loglik(x, filtered.log_sigma2, skip);
    return std::isfinite(ll) ? -ll / n_used : kInf;
  };

  const OptimizeResult opt = minimize(objective, x0, config.optimizer);
  const auto best = map.decode(opt.x);
  if (!best || !std::isfinite(opt.value)) {
    throw Error(ErrorKind::Fit, kModule, "optimizer ended at an inadmissible point");
  }

  ArmaParams ap = best->arma.params();
  ap.mean *= scale;
  FiegarchParams fp = best->fiegarch.params();
  fp.omega += 2.0 * log_scale;

  FitResult out(JointSpec{ArmaSpec(std::move(ap)), FiegarchSpec(std::move(fp))}, orders);
  out.loglik = -opt.value * n_used - n_used * log_scale;
  out.k = k;
  out.n_used = y.size() - skip;
  out.skip = skip;
  out.truncation = truncation;
  out.aic = -2.0 * out.loglik + 2.0 * static_cast<double>(k);
  out.bic = -2.0 * out.loglik + static_cast<double>(k) * std::log(n_used);
  out.converged = opt.converged;
  out.iterations = opt.iterations;
  out.evaluations = opt.evaluations;
  out.gradient_norm = opt.gradient_norm;
  out.used_fallback = opt.used_fallback;
  out.trace = opt.trace;
  return out;
}

Selection model_select(std::span<const ModelOrders> candidates, std::span<const double> r,
                       const FitConfig& config, std::size_t threads) {
  if (candidates.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "no candidate models");
  const std::size_t n = candidates.size();
  std::vector<std::optional<FitResult>> results(n);
  std::vector<std::string> errors(n);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = fit(candidates[i], r, config);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  Selection sel;
  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < n; ++i) {
    if (results[i]) {
      ok.push_back(i);
    } else {
      sel.failures.push_back({candidates[i], errors[i]});
    }
  }
  if (ok.empty()) {
    std::string msg = "every candidate failed to fit";
    if (!errors.empty()) msg += " (first: " + errors.front() + ")";
    throw Error(ErrorKind::Fit, kModule, msg);
  }
  std::stable_sort(ok.begin(), ok.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = *results[a];
    const auto& y = *results[b];
    if (x.bic != y.bic) return x.bic < y.bic;
    if (x.aic != y.aic) return x.aic < y.aic;
    return x.k < y.k;
  });
  for (std::size_t i : ok) sel.ranked.push_back(std::move(*results[i]));
  return sel;
}

PortmanteauTest ljung_box(std::span<const double> series, std::size_t lags) {
  const std::size_t n = series.size();
  if (lags == 0 || lags >= n) {
    throw Error(ErrorKind::InvalidArgument, kModule, "Ljung-Box lags must be in [1, n)");
  }
  const double mean = sample_mean(series);
  double c0 = 0.0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  if (!(c0 > 0.0)) throw Error(ErrorKind::InvalidArgument, kModule, "constant series");
  double q = 0.0;
  for (std::size_t k = 1; k <= lags; ++k) {
    double ck = 0.0;
    for (std::size_t t = k; t < n; ++t) ck += (series[t] - mean) * (series[t - k] - mean);
    const double rho = ck / c0;
    q += rho * rho / static_cast<double>(n - k);
  }
  q *= static_cast<double>(n) * static_cast<double>(n + 2);
  const double p = special::gamma_q(0.5 * static_cast<double>(lags), 0.5 * q);
  return {q, p, lags};
}

}  // namespace fierisk
