#include "fierisk/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fierisk/error.hpp"
#include "fierisk/fiegarch.hpp"
#include "fierisk/special.hpp"

namespace fierisk {
namespace {

constexpr std::string_view kModule = "risk";

void check_level(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::Domain, kModule, "level must lie in (0, 1)");
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw Error(ErrorKind::Domain, kModule, "EWMA lambda must lie in (0, 1)");
  }
}

void check_horizon(std::size_t h) {
  if (h == 0) throw Error(ErrorKind::InvalidArgument, kModule, "horizon must be >= 1");
}

std::vector<double> sorted_losses(std::span<const double> losses, std::size_t min_length) {
  if (losses.size() < std::max<std::size_t>(min_length, 1)) {
    throw Error(ErrorKind::InvalidArgument, kModule, "loss series shorter than the empirical floor");
  }
  std::vector<double> s(losses.begin(), losses.end());
  for (double v : s) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, kModule, "non-finite loss");
  }
  std::sort(s.begin(), s.end());
  return s;
}

std::size_t empirical_rank(std::size_t n, double p) {
  // ceil(n p) with a guard against p * n landing a hair above an integer
  const double np = static_cast<double>(n) * p;
  auto k = static_cast<std::size_t>(std::ceil(np - 1e-9 * std::max(1.0, np)));
  return std::clamp<std::size_t>(k, 1, n);
}

RiskEstimate make(RiskMeasure m, double p, std::size_t h, double value, Approach a) {
  RiskEstimate e;
  e.measure = m;
  e.level = p;
  e.horizon = h;
  e.value = value;
  e.approach = a;
  return e;
}

void mean_warning(RiskEstimate& e, double mu, std::size_t h) {
  if (h > 1 && mu != 0.0) {
    e.warnings.emplace_back("sqrt(h) scaling assumes a zero mean; the mean term is not scaled by it");
  }
}

double sample_variance(std::span<const double> r) {
  const double n = static_cast<double>(r.size());
  const double m = std::accumulate(r.begin(), r.end(), 0.0) / n;
  double s = 0.0;
  for (double v : r) s += (v - m) * (v - m);
  return s / (n - 1.0);
}

double tail_multiplier(double p) {
  return special::normal_pdf(special::normal_quantile(p)) / (1.0 - p);
}

Approach econometric_tag(const ModelOrders& o) {
  return o.fractional ? Approach::Fiegarch : Approach::Egarch;
}

Approach econometric_tag(const FiegarchSpec& s) {
  return s.d() != 0.0 ? Approach::Fiegarch : Approach::Egarch;
}

RiskEstimate econometric(const JointSpec& spec, std::span<const double> r, double p, std::size_t h,
                         std::size_t truncation, RiskMeasure m, Approach tag) {
  check_level(p);
  check_horizon(h);
  const auto f = forecast(spec, r, h, truncation);
  const double mean = f.mean[h - 1];
  const double sigma = std::sqrt(f.sigma2[h - 1]);
  const double mult = m == RiskMeasure::VaR ? special::normal_quantile(p) : tail_multiplier(p);
  return make(m, p, h, -mean + mult * sigma, tag);
}

void note_convergence(const FitResult& fit, RiskEstimate& e) {
  if (!fit.converged) e.warnings.emplace_back("fit did not converge");
}

double portfolio_sigma(const Eigen::MatrixXd& cov, std::span<const double> weights) {
  if (static_cast<std::size_t>(cov.rows()) != weights.size() || cov.rows() != cov.cols()) {
    throw Error(ErrorKind::InvalidArgument, kModule, "weights and covariance dimensions differ");
  }
  const Eigen::Map<const Eigen::VectorXd> a(weights.data(), static_cast<Eigen::Index>(weights.size()));
  const double v = a.dot(cov * a);
  return std::sqrt(std::max(v, 0.0));
}

}  // namespace

std::string_view to_string(RiskMeasure m) noexcept {
  switch (m) {
    case RiskMeasure::VaR: return "VaR";
    case RiskMeasure::ES: return "ES";
    case RiskMeasure::MaxLoss: return "MaxLoss";
  }
  return "unknown";
}

std::string_view to_string(Approach a) noexcept {
  switch (a) {
    case Approach::Empirical: return "empirical";
    case Approach::Normal: return "normal";
    case Approach::RiskMetrics: return "riskmetrics";
    case Approach::Egarch: return "egarch";
    case Approach::Fiegarch: return "fiegarch";
    case Approach::MaxLoss: return "maxloss";
  }
  return "unknown";
}

std::optional<Approach> parse_approach(std::string_view name) noexcept {
  for (auto a : {Approach::Empirical, Approach::Normal, Approach::RiskMetrics, Approach::Egarch,
                 Approach::Fiegarch, Approach::MaxLoss}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

RiskEstimate var_empirical(std::span<const double> losses, double p, std::size_t min_length) {
  check_level(p);
  const auto s = sorted_losses(losses, min_length);
  return make(RiskMeasure::VaR, p, 1, s[empirical_rank(s.size(), p) - 1], Approach::Empirical);
}

RiskEstimate es_empirical(std::span<const double> losses, double p, std::size_t min_length) {
  check_level(p);
  const auto s = sorted_losses(losses, min_length);
  const double var = s[empirical_rank(s.size(), p) - 1];
  const auto first = std::lower_bound(s.begin(), s.end(), var);
  const double sum = std::accumulate(first, s.end(), 0.0);
  const auto count = static_cast<double>(s.end() - first);
  return make(RiskMeasure::ES, p, 1, sum / count, Approach::Empirical);
}

RiskEstimate var_normal(double mu, double sigma, double p, std::size_t h, bool mean_per_period) {
  check_level(p);
  check_horizon(h);
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
    throw Error(ErrorKind::Domain, kModule, "sigma must be positive and finite");
  }
  const double hd = static_cast<double>(h);
  const double m = mean_per_period ? mu * hd : mu;
  auto e = make(RiskMeasure::VaR, p, h, m + special::normal_quantile(p) * std::sqrt(hd) * sigma,
                Approach::Normal);
  mean_warning(e, mu, h);
  return e;
}

RiskEstimate es_normal(double mu, double sigma, double p, std::size_t h, bool mean_per_period) {
  check_level(p);
  check_horizon(h);
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
    throw Error(ErrorKind::Domain, kModule, "sigma must be positive and finite");
  }
  const double hd = static_cast<double>(h);
  const double m = mean_per_period ? mu * hd : mu;
  auto e = make(RiskMeasure::ES, p, h, m + std::sqrt(hd) * sigma * tail_multiplier(p),
                Approach::Normal);
  mean_warning(e, mu, h);
  return e;
}

EwmaState ewma_update(const EwmaState& state, double r) {
  check_lambda(state.lambda);
  return {state.lambda, state.lambda * state.sigma2 + (1.0 - state.lambda) * r * r};
}

EwmaCovState ewma_update(const EwmaCovState& state, std::span<const double> r) {
  check_lambda(state.lambda);
  const auto m = static_cast<Eigen::Index>(r.size());
  if (state.cov.rows() != m || state.cov.cols() != m) {
    throw Error(ErrorKind::InvalidArgument, kModule, "return vector and covariance dimensions differ");
  }
  EwmaCovState out{state.lambda, Eigen::MatrixXd(m, m)};
  const double l = state.lambda;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = l * state.cov(i, j) +
                       (1.0 - l) * r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(j)];
      out.cov(i, j) = v;
      out.cov(j, i) = v;
    }
  }
  return out;
}

EwmaState ewma_filter(std::span<const double> r, double lambda, std::size_t window) {
  check_lambda(lambda);
  if (r.size() < 2) throw Error(ErrorKind::InvalidArgument, kModule, "EWMA needs at least 2 returns");
  for (double v : r) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, kModule, "non-finite return");
  }
  const std::size_t w = std::clamp<std::size_t>(window, 2, r.size());
  EwmaState s{lambda, sample_variance(r.first(w))};
  for (double v : r) s = ewma_update(s, v);
  return s;
}

EwmaCovState ewma_filter(const Eigen::MatrixXd& returns, double lambda, std::size_t window) {
  check_lambda(lambda);
  const auto n = returns.rows();
  const auto m = returns.cols();
  if (n < 2 || m < 1) throw Error(ErrorKind::InvalidArgument, kModule, "EWMA needs at least 2 returns");
  if (!returns.allFinite()) throw Error(ErrorKind::InvalidArgument, kModule, "non-finite return");
  const auto w = static_cast<Eigen::Index>(std::clamp<std::size_t>(window, 2, static_cast<std::size_t>(n)));
  const Eigen::MatrixXd head = returns.topRows(w);
  const Eigen::RowVectorXd mean = head.colwise().mean();
  const Eigen::MatrixXd centered = head.rowwise() - mean;
  EwmaCovState s{lambda, (centered.transpose() * centered) / static_cast<double>(w - 1)};
  s.cov = 0.5 * (s.cov + s.cov.transpose()).eval();
  std::vector<double> row(static_cast<std::size_t>(m));
  for (Eigen::Index t = 0; t < n; ++t) {
    for (Eigen::Index j = 0; j < m; ++j) row[static_cast<std::size_t>(j)] = returns(t, j);
    s = ewma_update(s, row);
  }
  return s;
}

RiskEstimate var_riskmetrics(std::span<const double> r, double p, std::size_t h, double lambda,
                             std::size_t window) {
  check_level(p);
  check_horizon(h);
  const double sigma = std::sqrt(ewma_filter(r, lambda, window).sigma2);
  return make(RiskMeasure::VaR, p, h,
              special::normal_quantile(p) * std::sqrt(static_cast<double>(h)) * sigma,
              Approach::RiskMetrics);
}

RiskEstimate es_riskmetrics(std::span<const double> r, double p, std::size_t h, double lambda,
                            std::size_t window) {
  check_level(p);
  check_horizon(h);
  const double sigma = std::sqrt(ewma_filter(r, lambda, window).sigma2);
  return make(RiskMeasure::ES, p, h, tail_multiplier(p) * std::sqrt(static_cast<double>(h)) * sigma,
              Approach::RiskMetrics);
}

RiskEstimate var_riskmetrics(const Eigen::MatrixXd& returns, std::span<const double> weights,
                             double p, std::size_t h, double lambda, std::size_t window) {
  check_level(p);
  check_horizon(h);
  const double sigma = portfolio_sigma(ewma_filter(returns, lambda, window).cov, weights);
  return make(RiskMeasure::VaR, p, h,
              special::normal_quantile(p) * std::sqrt(static_cast<double>(h)) * sigma,
              Approach::RiskMetrics);
}

RiskEstimate es_riskmetrics(const Eigen::MatrixXd& returns, std::span<const double> weights,
                            double p, std::size_t h, double lambda, std::size_t window) {
  check_level(p);
  check_horizon(h);
  const double sigma = portfolio_sigma(ewma_filter(returns, lambda, window).cov, weights);
  return make(RiskMeasure::ES, p, h, tail_multiplier(p) * std::sqrt(static_cast<double>(h)) * sigma,
              Approach::RiskMetrics);
}

ConditionalForecast forecast(const JointSpec& spec, std::span<const double> r, std::size_t h,
                             std::size_t truncation) {
  check_horizon(h);
  if (r.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "empty return history");
  const auto x = arma_filter(spec.arma, r);
  const auto filtered = filter_volatility(spec.fiegarch, x, truncation);
  return {arma_forecast(spec.arma, r, x, h), forecast_volatility(spec.fiegarch, filtered, h)};
}

RiskEstimate var_econometric(const FitResult& fit, std::span<const double> r, double p,
                             std::size_t h, bool allow_unconverged) {
  if (!fit.converged && !allow_unconverged) {
    throw Error(ErrorKind::Fit, kModule, "fit did not converge; pass allow_unconverged to override");
  }
  auto e = econometric(fit.spec, r, p, h, fit.truncation, RiskMeasure::VaR, econometric_tag(fit.orders));
  note_convergence(fit, e);
  return e;
}

RiskEstimate es_econometric(const FitResult& fit, std::span<const double> r, double p,
                            std::size_t h, bool allow_unconverged) {
  if (!fit.converged && !allow_unconverged) {
    throw Error(ErrorKind::Fit, kModule, "fit did not converge; pass allow_unconverged to override");
  }
  auto e = econometric(fit.spec, r, p, h, fit.truncation, RiskMeasure::ES, econometric_tag(fit.orders));
  note_convergence(fit, e);
  return e;
}

RiskEstimate var_econometric(const JointSpec& spec, std::span<const double> r, double p,
                             std::size_t h, std::size_t truncation) {
  return econometric(spec, r, p, h, truncation, RiskMeasure::VaR, econometric_tag(spec.fiegarch));
}

RiskEstimate es_econometric(const JointSpec& spec, std::span<const double> r, double p,
                            std::size_t h, std::size_t truncation) {
  return econometric(spec, r, p, h, truncation, RiskMeasure::ES, econometric_tag(spec.fiegarch));
}

RiskEstimate maxloss(std::span<const double> weights, const Eigen::MatrixXd& cov, double p) {
  check_level(p);
  const auto m = static_cast<Eigen::Index>(weights.size());
  if (m == 0 || cov.rows() != m || cov.cols() != m) {
    throw Error(ErrorKind::InvalidArgument, kModule, "weights and covariance dimensions differ");
  }
  if (!cov.allFinite() || (cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + cov.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::InvalidArgument, kModule, "covariance must be finite and symmetric");
  }
  const Eigen::Map<const Eigen::VectorXd> a(weights.data(), m);
  const Eigen::VectorXd sa = cov * a;
  const double var = a.dot(sa);
  if (!(var > 0.0)) {
    throw Error(ErrorKind::DegeneratePortfolio, kModule, "portfolio variance a'Sigma a is not positive");
  }
  const double root_c = std::sqrt(special::chi2_quantile(p, static_cast<double>(m)));
  const double sd = std::sqrt(var);
  auto e = make(RiskMeasure::MaxLoss, p, 1, -root_c * sd, Approach::MaxLoss);
  e.sign_convention = kReturnSigned;
  std::vector<double> z(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) z[static_cast<std::size_t>(i)] = -(root_c / sd) * sa(i);
  e.scenario = std::move(z);
  return e;
}

void validate(const PortfolioSpec& spec) {
  if (spec.weights.empty() || static_cast<Eigen::Index>(spec.weights.size()) != spec.returns.cols()) {
    throw Error(ErrorKind::InvalidArgument, kModule, "weight count differs from the number of assets");
  }
  const double sum = std::accumulate(spec.weights.begin(), spec.weights.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-10) throw Error(ErrorKind::InvalidArgument, kModule, "weights must sum to 1");
  if (!(spec.v0 > 0.0)) throw Error(ErrorKind::InvalidArgument, kModule, "initial value must be positive");
  if (!spec.returns.allFinite()) throw Error(ErrorKind::InvalidArgument, kModule, "non-finite return");
}

std::vector<double> portfolio_values(const PortfolioSpec& spec) {
  validate(spec);
  const auto n = spec.returns.rows();
  const auto m = spec.returns.cols();
  std::vector<double> cum(static_cast<std::size_t>(m), 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1);
  v[0] = spec.v0;
  for (Eigen::Index t = 0; t < n; ++t) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      cum[static_cast<std::size_t>(i)] += spec.returns(t, i);
      total += spec.weights[static_cast<std::size_t>(i)] * std::exp(cum[static_cast<std::size_t>(i)]);
    }
    v[static_cast<std::size_t>(t) + 1] = spec.v0 * total;
  }
  return v;
}

double portfolio_loss(const PortfolioSpec& spec, std::size_t t) {
  validate(spec);
  if (t >= static_cast<std::size_t>(spec.returns.rows())) {
    throw Error(ErrorKind::InvalidArgument, kModule, "portfolio loss index out of range");
  }
  double prev = 1.0;
  if (!spec.normalized) prev = portfolio_values(spec)[t];
  double r = 0.0;
  for (std::size_t i = 0; i < spec.weights.size(); ++i) {
    r += spec.weights[i] * spec.returns(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i));
  }
  return -prev * r;
}

std::vector<double> portfolio_losses(const PortfolioSpec& spec) {
  validate(spec);
  const auto pr = portfolio_returns(spec.returns, spec.weights);
  std::vector<double> v;
  if (!spec.normalized) v = portfolio_values(spec);
  std::vector<double> out(pr.size());
  for (std::size_t t = 0; t < pr.size(); ++t) out[t] = -(spec.normalized ? 1.0 : v[t]) * pr[t];
  return out;
}

std::vector<double> portfolio_returns(const Eigen::MatrixXd& returns, std::span<const double> weights) {
  if (static_cast<Eigen::Index>(weights.size()) != returns.cols()) {
    throw Error(ErrorKind::InvalidArgument, kModule, "weight count differs from the number of assets");
  }
  std::vector<double> out(static_cast<std::size_t>(returns.rows()), 0.0);
  for (Eigen::Index t = 0; t < returns.rows(); ++t) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < returns.cols(); ++i) s += weights[static_cast<std::size_t>(i)] * returns(t, i);
    out[static_cast<std::size_t>(t)] = s;
  }
  return out;
}

}  // namespace fierisk
