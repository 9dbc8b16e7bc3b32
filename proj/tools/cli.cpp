#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "fierisk/error.hpp"
#include "fierisk/estimation.hpp"
#include "fierisk/fiegarch.hpp"
#include "fierisk/montecarlo.hpp"
#include "fierisk/panel.hpp"
#include "fierisk/risk.hpp"
#include "fierisk/rng.hpp"
#include "fierisk/version.hpp"

namespace fierisk::cli {
namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr std::string_view kModule = "cli";

std::string fmt(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Flags {
  std::optional<std::string> config, level, approach, out, input, format, weights, model, orders,
      asset, cov;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> horizon, truncation, sim_truncation, replications, n, burn_in, steps,
      holdout, threads;
  std::optional<double> lambda, v0;
  bool full = false, oracle = false, forecast = false, no_mean = false;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file (default: $FIERISK_CONFIG)");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--level", f.level, "confidence levels, comma separated");
  app->add_option("--horizon", f.horizon, "risk horizon h in periods");
  app->add_option("--steps", f.steps, "number of forecast steps");
  app->add_option("--lambda", f.lambda, "EWMA decay");
  app->add_option("--truncation", f.truncation, "filter truncation M (simulate: simulation M)");
  app->add_option("--sim-truncation", f.sim_truncation, "simulation truncation M");
  app->add_option("--approach", f.approach, "approaches, comma separated, or 'all'");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--replications", f.replications, "Monte Carlo replications");
  app->add_flag("--full", f.full, "1000 replications");
  app->add_option("--input", f.input, "input panel");
  app->add_option("--format", f.format, "csv-prices or csv-returns");
  app->add_option("--asset", f.asset, "asset column to analyse");
  app->add_option("--weights", f.weights, "portfolio weights, comma separated");
  app->add_option("--v0", f.v0, "initial portfolio value");
  app->add_option("--cov", f.cov, "covariance matrix CSV");
  app->add_option("--model", f.model, "reference model name(s) M1..M5, comma separated, or 'all'");
  app->add_option("--orders", f.orders, "p1,q1,p2,q2 or 'grid'");
  app->add_flag("--no-mean", f.no_mean, "fix the mean at zero");
  app->add_option("--n", f.n, "sample size");
  app->add_option("--burn-in", f.burn_in, "simulation burn-in");
  app->add_option("--holdout", f.holdout, "Monte Carlo holdout");
  app->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  app->add_flag("--oracle", f.oracle, "experiment: use the generating parameters");
  app->add_flag("--forecast", f.forecast, "experiment: also run the volatility forecast study");
}

Config resolve(const Flags& f, const std::string& command) {
  Config c;
  if (const auto path = config_path(f.config)) apply_file(c, *path);
  if (f.seed) c.seed = *f.seed;
  if (f.level) {
    c.levels = parse_number_list(*f.level);
    c.levels_explicit = true;
  }
  if (f.horizon) c.horizon = *f.horizon;
  if (f.steps) c.steps = *f.steps;
  if (f.lambda) c.lambda = *f.lambda;
  if (f.truncation) (command == "simulate" ? c.sim_truncation : c.filter_truncation) = *f.truncation;
  if (f.sim_truncation) c.sim_truncation = *f.sim_truncation;
  if (f.approach) c.approaches = parse_word_list(*f.approach);
  if (f.out) c.out = *f.out;
  if (f.replications) c.replications = *f.replications;
  if (f.full) c.replications = kFullReplications;
  if (f.input) c.input = *f.input;
  if (f.format) c.format = *f.format;
  if (f.asset) c.asset = *f.asset;
  if (f.weights) c.weights = parse_number_list(*f.weights);
  if (f.v0) c.v0 = *f.v0;
  if (f.cov) c.cov = *f.cov;
  if (f.model) c.model = *f.model;
  if (f.orders) c.orders = *f.orders;
  if (f.no_mean) c.fit_mean = false;
  if (f.n) c.n = *f.n;
  if (f.burn_in) c.burn_in = *f.burn_in;
  if (f.holdout) c.holdout = *f.holdout;
  if (f.threads) c.threads = *f.threads;
  if (f.oracle) c.oracle = true;
  if (f.forecast) c.forecast = true;

  for (double p : c.levels) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::Domain, kModule, "levels must lie in (0, 1)");
  }
  if (c.levels.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "no levels given");
  if (c.horizon == 0) throw Error(ErrorKind::InvalidArgument, kModule, "horizon must be >= 1");
  return c;
}

// ---- output helpers ----

fs::path prepare_out(const Config& c) {
  fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Load, kModule, "cannot create output directory " + c.out);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Load, kModule, "cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const ordered_json& j) { write_file(path, j.dump(2) + "\n"); }

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return fmt("%016llx", static_cast<unsigned long long>(h));
}

ordered_json metadata(const Config& c, const std::string& command, std::string_view sign,
                      const std::vector<std::string>& approaches) {
  ordered_json m;
  m["command"] = command;
  m["library"] = kLibraryName;
  m["version"] = kLibraryVersion;
  m["rng"] = kRngName;
  m["seed"] = c.seed;
  m["sign_convention"] = sign;
  m["levels"] = c.levels;
  m["horizon"] = c.horizon;
  m["approach"] = approaches;
  m["truncation"] = {{"simulation", c.sim_truncation}, {"filter", c.filter_truncation}};
  return m;
}

ordered_json spec_json(const FiegarchSpec& s) {
  return {{"omega", s.omega()},
          {"alpha", std::vector<double>(s.alpha().begin(), s.alpha().end())},
          {"beta", std::vector<double>(s.beta().begin(), s.beta().end())},
          {"theta", s.theta()},
          {"gamma", s.gamma()},
          {"d", s.d()}};
}

ordered_json spec_json(const ArmaSpec& s) {
  return {{"mean", s.mean()},
          {"ar", std::vector<double>(s.ar().begin(), s.ar().end())},
          {"ma", std::vector<double>(s.ma().begin(), s.ma().end())}};
}

ordered_json estimate_json(const RiskEstimate& e) {
  ordered_json j{{"measure", to_string(e.measure)},
                 {"level", e.level},
                 {"horizon", e.horizon},
                 {"value", e.value},
                 {"approach", to_string(e.approach)},
                 {"sign_convention", e.sign_convention}};
  if (e.scenario) j["scenario"] = *e.scenario;
  j["warnings"] = e.warnings;
  return j;
}

std::string coefficients_line(const FitResult& r) {
  const auto& a = r.spec.arma;
  const auto& f = r.spec.fiegarch;
  std::string s = fmt("mean=%.4f", a.mean());
  for (std::size_t i = 0; i < a.p(); ++i) s += fmt(" phi%zu=%.4f", i + 1, a.ar()[i]);
  for (std::size_t j = 0; j < a.q(); ++j) s += fmt(" vartheta%zu=%.4f", j + 1, a.ma()[j]);
  s += fmt(" omega=%.4f theta=%.4f gamma=%.4f d=%.4f", f.omega(), f.theta(), f.gamma(), f.d());
  for (std::size_t i = 0; i < f.p(); ++i) s += fmt(" alpha%zu=%.4f", i + 1, f.alpha()[i]);
  for (std::size_t j = 0; j < f.q(); ++j) s += fmt(" beta%zu=%.4f", j + 1, f.beta()[j]);
  return s;
}

// ---- inputs ----

std::vector<Approach> approaches_of(const Config& c) {
  const std::vector<Approach> all{Approach::Empirical, Approach::Normal, Approach::RiskMetrics,
                                  Approach::Egarch, Approach::Fiegarch};
  std::vector<Approach> out;
  for (const auto& w : c.approaches) {
    if (w == "all") return all;
    const auto a = parse_approach(w);
    if (!a || *a == Approach::MaxLoss) {
      throw Error(ErrorKind::InvalidArgument, kModule, "unknown approach '" + w + "'");
    }
    if (std::find(out.begin(), out.end(), *a) == out.end()) out.push_back(*a);
  }
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "no approaches given");
  return out;
}

std::vector<std::string> names(const std::vector<Approach>& v) {
  std::vector<std::string> s;
  for (auto a : v) s.emplace_back(to_string(a));
  return s;
}

std::vector<NamedModel> models_of(const Config& c) {
  if (c.model == "all") return reference_models();
  std::vector<NamedModel> out;
  for (const auto& name : parse_word_list(c.model)) {
    const auto spec = reference_model(name);
    if (!spec) throw Error(ErrorKind::InvalidArgument, kModule, "unknown model '" + name + "' (use M1..M5)");
    out.push_back({name, *spec});
  }
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "no model given");
  return out;
}

ReturnPanel load_panel(const Config& c) {
  if (c.input.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "--input is required");
  const auto format = parse_panel_format(c.format);
  if (!format) throw Error(ErrorKind::InvalidArgument, kModule, "unknown format '" + c.format + "'");
  return ingest(c.input, *format);
}

struct Series {
  std::vector<double> r;
  std::string label;
};

Series select_series(const ReturnPanel& panel, const Config& c) {
  if (!c.asset.empty()) {
    const auto it = std::find(panel.assets.begin(), panel.assets.end(), c.asset);
    if (it == panel.assets.end()) throw Error(ErrorKind::InvalidArgument, kModule, "no asset named '" + c.asset + "'");
    return {panel.column(static_cast<std::size_t>(it - panel.assets.begin())), c.asset};
  }
  if (!c.weights.empty()) {
    PortfolioSpec p{c.weights, c.v0, panel.returns, true};
    validate(p);
    return {portfolio_returns(panel.returns, c.weights), "portfolio"};
  }
  if (panel.assets.size() == 1) return {panel.column(0), panel.assets.front()};
  throw Error(ErrorKind::InvalidArgument, kModule, "panel has several assets: pass --asset or --weights");
}

std::vector<ModelOrders> candidates_of(const Config& c) {
  std::vector<ModelOrders> out;
  if (c.orders == "grid") {
    for (std::size_t p1 = 0; p1 <= 3; ++p1)
      for (std::size_t q1 = 0; q1 <= 3; ++q1)
        for (std::size_t p2 = 0; p2 <= 1; ++p2)
          for (std::size_t q2 = 0; q2 <= 1; ++q2) out.push_back({p1, q1, p2, q2, true, c.fit_mean});
    return out;
  }
  std::istringstream groups(c.orders);
  std::string group;
  while (std::getline(groups, group, ';')) {
    const auto v = parse_number_list(group);
    if (v.size() != 4) throw Error(ErrorKind::InvalidArgument, kModule, "orders must be p1,q1,p2,q2");
    ModelOrders o;
    for (double x : v) {
      if (x < 0 || x != std::floor(x)) throw Error(ErrorKind::InvalidArgument, kModule, "orders must be non-negative integers");
    }
    o.p1 = static_cast<std::size_t>(v[0]);
    o.q1 = static_cast<std::size_t>(v[1]);
    o.p2 = static_cast<std::size_t>(v[2]);
    o.q2 = static_cast<std::size_t>(v[3]);
    o.fit_mean = c.fit_mean;
    out.push_back(o);
  }
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "no model orders given");
  return out;
}

FitConfig fit_config(const Config& c) {
  FitConfig f;
  f.optimizer = c.optimizer;
  f.truncation = c.filter_truncation;
  return f;
}

ordered_json fit_json(const FitResult& r, std::span<const double> series) {
  ordered_json j{{"model", r.orders.label()},
                 {"arma", spec_json(r.spec.arma)},
                 {"fiegarch", spec_json(r.spec.fiegarch)},
                 {"loglik", r.loglik},
                 {"aic", r.aic},
                 {"bic", r.bic},
                 {"parameters", r.k},
                 {"n_used", r.n_used},
                 {"converged", r.converged},
                 {"iterations", r.iterations},
                 {"gradient_norm", r.gradient_norm},
                 {"used_fallback", r.used_fallback}};
  const auto z = standardized_residuals(r.spec, series, r.truncation);
  std::vector<double> z2;
  for (std::size_t t = r.skip; t < z.size(); ++t) z2.push_back(z[t] * z[t]);
  const auto lb = ljung_box(z2, 10);
  j["ljung_box_squared_residuals"] = {{"lags", lb.lags}, {"statistic", lb.statistic}, {"p_value", lb.p_value}};
  return j;
}

FitResult fit_best(const Config& c, std::span<const double> r, ordered_json* log = nullptr) {
  const auto candidates = candidates_of(c);
  auto sel = model_select(candidates, r, fit_config(c), c.threads);
  if (log) {
    for (const auto& f : sel.failures) (*log).push_back({{"model", f.orders.label()}, {"error", f.message}});
  }
  return std::move(sel.ranked.front());
}

// ---- commands ----

int cmd_simulate(const Config& c, std::ostream& out) {
  const auto models = models_of(c);
  if (models.size() != 1) throw Error(ErrorKind::InvalidArgument, kModule, "simulate takes a single model");
  const auto& model = models.front();
  SimulationOptions opt;
  opt.n = c.n;
  opt.burn_in = c.burn_in;
  opt.truncation = c.sim_truncation;
  const auto path = simulate(model.spec, opt, SeedRecord{c.seed, 0});

  std::string csv = "t,x,sigma2,z\n";
  for (std::size_t t = 0; t < path.n; ++t) {
    csv += std::to_string(t + 1) + "," + format_double(path.x[t]) + "," + format_double(path.sigma2[t]) + "," +
           format_double(path.z[t]) + "\n";
  }
  const auto dir = prepare_out(c);
  write_file(dir / "simulate.csv", csv);

  double mean_ls = 0.0, mean_x = 0.0, mean_x2 = 0.0;
  for (std::size_t t = 0; t < path.n; ++t) {
    mean_ls += path.log_sigma2[t] / static_cast<double>(path.n);
    mean_x += path.x[t] / static_cast<double>(path.n);
    mean_x2 += path.x[t] * path.x[t] / static_cast<double>(path.n);
  }
  ordered_json j;
  j["metadata"] = metadata(c, "simulate", "not-applicable", {});
  j["metadata"]["burn_in"] = c.burn_in;
  j["model"] = {{"name", model.name}, {"spec", spec_json(model.spec)}};
  j["n"] = path.n;
  j["seed_record"] = {{"seed", path.seed.seed}, {"stream", path.seed.stream}};
  j["summary"] = {{"mean_x", mean_x}, {"mean_x2", mean_x2}, {"mean_log_sigma2", mean_ls}};
  j["csv"] = {{"file", "simulate.csv"}, {"columns", {"t", "x", "sigma2", "z"}}, {"fnv1a64", fnv1a(csv)}};
  write_json(dir / "simulate.json", j);

  std::string txt = fmt("Simulated %s path, n = %zu, burn-in = %zu, M = %zu, seed = %llu\n", model.name.c_str(),
                        path.n, c.burn_in, c.sim_truncation, static_cast<unsigned long long>(c.seed));
  txt += fmt("%-18s %12s\n", "statistic", "value");
  txt += fmt("%-18s %12.6f\n", "mean X", mean_x);
  txt += fmt("%-18s %12.6f\n", "mean X^2", mean_x2);
  txt += fmt("%-18s %12.6f\n", "mean ln sigma^2", mean_ls);
  write_file(dir / "simulate.txt", txt);
  out << txt;
  return 0;
}

int cmd_fit(const Config& c, std::ostream& out) {
  const auto panel = load_panel(c);
  const auto series = select_series(panel, c);
  const auto sel = model_select(candidates_of(c), series.r, fit_config(c), c.threads);

  ordered_json j;
  j["metadata"] = metadata(c, "fit", "not-applicable", {});
  j["series"] = {{"label", series.label}, {"n", series.r.size()}};
  j["ranked"] = ordered_json::array();
  for (const auto& r : sel.ranked) j["ranked"].push_back(fit_json(r, series.r));
  j["failures"] = ordered_json::array();
  for (const auto& f : sel.failures) j["failures"].push_back({{"model", f.orders.label()}, {"error", f.message}});
  const auto dir = prepare_out(c);
  write_json(dir / "fit.json", j);

  std::string txt = fmt("Fitted models for %s (n = %zu), ranked by BIC\n", series.label.c_str(), series.r.size());
  txt += fmt("%-4s %-28s %4s %14s %14s %14s %5s\n", "rank", "model", "k", "loglik", "AIC", "BIC", "conv");
  for (std::size_t i = 0; i < sel.ranked.size(); ++i) {
    const auto& r = sel.ranked[i];
    txt += fmt("%-4zu %-28s %4zu %14.4f %14.4f %14.4f %5s\n", i + 1, r.orders.label().c_str(), r.k, r.loglik,
               r.aic, r.bic, r.converged ? "yes" : "no");
  }
  txt += "selected: " + sel.ranked.front().orders.label() + "\n  " + coefficients_line(sel.ranked.front()) + "\n";
  write_file(dir / "fit.txt", txt);
  out << txt;
  return 0;
}

int cmd_forecast(const Config& c, std::ostream& out) {
  const auto panel = load_panel(c);
  const auto series = select_series(panel, c);
  ordered_json failures = ordered_json::array();
  const auto best = fit_best(c, series.r, &failures);
  const auto f = forecast(best.spec, series.r, c.steps, best.truncation);

  ordered_json j;
  j["metadata"] = metadata(c, "forecast", "return-units", {std::string(best.orders.fractional ? "fiegarch" : "egarch")});
  j["series"] = {{"label", series.label}, {"n", series.r.size()}};
  j["model"] = fit_json(best, series.r);
  j["failures"] = failures;
  j["forecast"] = ordered_json::array();
  for (std::size_t h = 0; h < c.steps; ++h) {
    j["forecast"].push_back({{"h", h + 1}, {"mean", f.mean[h]}, {"sigma", std::sqrt(f.sigma2[h])}, {"sigma2", f.sigma2[h]}});
  }
  const auto dir = prepare_out(c);
  write_json(dir / "forecast.json", j);

  std::string txt = fmt("Forecast values of the conditional mean and volatility: %s, %s\n", series.label.c_str(),
                        best.orders.label().c_str());
  txt += fmt("%4s %14s %14s\n", "h", "r_hat", "sigma_hat");
  for (std::size_t h = 0; h < c.steps; ++h) {
    txt += fmt("%4zu %14.6f %14.6f\n", h + 1, f.mean[h], std::sqrt(f.sigma2[h]));
  }
  write_file(dir / "forecast.txt", txt);
  out << txt;
  return 0;
}

int cmd_risk(const Config& c, std::ostream& out) {
  const auto panel = load_panel(c);
  const auto series = select_series(panel, c);
  const auto approaches = approaches_of(c);
  const bool multivariate = !c.weights.empty() && c.asset.empty() && panel.assets.size() > 1;
  std::vector<double> losses(series.r.size());
  std::transform(series.r.begin(), series.r.end(), losses.begin(), [](double v) { return -v; });
  const double mean = std::accumulate(series.r.begin(), series.r.end(), 0.0) / static_cast<double>(series.r.size());
  double var = 0.0;
  for (double v : series.r) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(series.r.size() - 1));

  ordered_json j;
  j["metadata"] = metadata(c, "risk", kLossPositive, names(approaches));
  j["metadata"]["lambda"] = c.lambda;
  j["series"] = {{"label", series.label}, {"n", series.r.size()}, {"weights", c.weights}};
  j["estimates"] = ordered_json::array();
  j["fits"] = ordered_json::array();
  ordered_json failures = ordered_json::array();

  struct Row {
    Approach approach;
    std::vector<std::pair<double, double>> var_es;  // per level
  };
  std::vector<Row> rows;
  for (Approach a : approaches) {
    Row row{a, {}};
    std::optional<FitResult> fitted;
    if (a == Approach::Egarch) {
      Config ce = c;
      ce.orders = "0,0,1,1";
      auto cands = candidates_of(ce);
      for (auto& o : cands) o.fractional = false;
      fitted = std::move(model_select(cands, series.r, fit_config(c), 1).ranked.front());
    } else if (a == Approach::Fiegarch) {
      fitted = fit_best(c, series.r, &failures);
    }
    if (fitted) j["fits"].push_back(fit_json(*fitted, series.r));
    for (double p : c.levels) {
      RiskEstimate v, e;
      switch (a) {
        case Approach::Empirical:
          v = var_empirical(losses, p);
          e = es_empirical(losses, p);
          break;
        case Approach::Normal:
          v = var_normal(-mean, sd, p, c.horizon);
          e = es_normal(-mean, sd, p, c.horizon);
          break;
        case Approach::RiskMetrics:
          if (multivariate) {
            v = var_riskmetrics(panel.returns, c.weights, p, c.horizon, c.lambda, c.ewma_window);
            e = es_riskmetrics(panel.returns, c.weights, p, c.horizon, c.lambda, c.ewma_window);
          } else {
            v = var_riskmetrics(series.r, p, c.horizon, c.lambda, c.ewma_window);
            e = es_riskmetrics(series.r, p, c.horizon, c.lambda, c.ewma_window);
          }
          break;
        default:
          v = var_econometric(*fitted, series.r, p, c.horizon, true);
          e = es_econometric(*fitted, series.r, p, c.horizon, true);
          break;
      }
      j["estimates"].push_back(estimate_json(v));
      j["estimates"].push_back(estimate_json(e));
      row.var_es.emplace_back(v.value, e.value);
    }
    rows.push_back(std::move(row));
  }
  j["failures"] = failures;

  if (multivariate) {
    ordered_json comp = ordered_json::array();
    for (double p : c.levels) {
      double sum_var = 0.0, sum_es = 0.0;
      for (std::size_t i = 0; i < panel.assets.size(); ++i) {
        const auto col = panel.column(i);
        const double m = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
        double v2 = 0.0;
        for (double x : col) v2 += (x - m) * (x - m);
        const double s = std::sqrt(v2 / static_cast<double>(col.size() - 1));
        sum_var += c.weights[i] * var_normal(-m, s, p, c.horizon).value;
        sum_es += c.weights[i] * es_normal(-m, s, p, c.horizon).value;
      }
      comp.push_back({{"level", p}, {"weighted_sum_var", sum_var}, {"weighted_sum_es", sum_es}});
    }
    j["normal_components"] = comp;
  }
  const auto dir = prepare_out(c);
  write_json(dir / "risk.json", j);

  std::string txt = fmt("VaR and ES (in parentheses), %s, horizon %zu, losses positive\n", series.label.c_str(), c.horizon);
  txt += fmt("%-12s", "approach");
  for (double p : c.levels) txt += fmt(" %24s", fmt("p = %.2f", p).c_str());
  txt += "\n";
  for (const auto& row : rows) {
    txt += fmt("%-12s", std::string(to_string(row.approach)).c_str());
    for (const auto& [v, e] : row.var_es) txt += fmt(" %24s", fmt("%.4f (%.4f)", v, e).c_str());
    txt += "\n";
  }
  write_file(dir / "risk.txt", txt);
  out << txt;
  return 0;
}

Eigen::MatrixXd load_cov(const std::string& path, std::vector<std::string>& assets) {
  const auto panel = ingest(path, PanelFormat::CsvReturns);
  if (panel.returns.rows() != panel.returns.cols()) {
    throw Error(ErrorKind::Load, kModule, path + ": covariance matrix must be square");
  }
  assets = panel.assets;
  return panel.returns;
}

int cmd_maxloss(const Config& c, std::ostream& out) {
  std::vector<std::string> assets;
  Eigen::MatrixXd cov;
  if (!c.cov.empty()) {
    cov = load_cov(c.cov, assets);
  } else {
    const auto panel = load_panel(c);
    assets = panel.assets;
    const Eigen::RowVectorXd m = panel.returns.colwise().mean();
    const Eigen::MatrixXd centered = panel.returns.rowwise() - m;
    cov = centered.transpose() * centered / static_cast<double>(panel.returns.rows() - 1);
  }
  if (c.weights.size() != assets.size()) {
    throw Error(ErrorKind::InvalidArgument, kModule, "--weights must give one weight per asset");
  }
  std::vector<double> levels = c.levels;
  if (!c.levels_explicit) {
    levels.clear();
    for (int k = 10; k <= 19; ++k) levels.push_back(k * 0.05);
    levels.push_back(0.99);
  }

  ordered_json j;
  Config meta = c;
  meta.levels = levels;
  j["metadata"] = metadata(meta, "maxloss", kReturnSigned, {"maxloss"});
  j["assets"] = assets;
  j["weights"] = c.weights;
  j["estimates"] = ordered_json::array();
  std::string txt = "MaxLoss and worst-case scenario (log-returns; negative = loss)\n";
  txt += fmt("%6s %12s", "p", "MaxLoss");
  for (const auto& a : assets) txt += fmt(" %12s", a.substr(0, 12).c_str());
  txt += "\n";
  for (double p : levels) {
    const auto e = maxloss(c.weights, cov, p);
    j["estimates"].push_back(estimate_json(e));
    txt += fmt("%6.2f %12.4f", p, e.value);
    for (double z : *e.scenario) txt += fmt(" %12.4f", z);
    txt += "\n";
  }
  const auto dir = prepare_out(c);
  write_json(dir / "maxloss.json", j);
  write_file(dir / "maxloss.txt", txt);
  out << txt;
  return 0;
}

int cmd_experiment(const Config& c, std::ostream& out, std::ostream& err) {
  ExperimentPlan plan;
  plan.models = models_of(c);
  plan.n = c.n;
  plan.replications = c.replications;
  plan.holdout = c.holdout;
  plan.levels = c.levels;
  plan.approaches = approaches_of(c);
  plan.master_seed = c.seed;
  plan.simulation.burn_in = c.burn_in;
  plan.simulation.truncation = c.sim_truncation;
  plan.fit = fit_config(c);
  plan.lambda = c.lambda;
  plan.horizons = std::min(c.steps, c.holdout);
  plan.oracle = c.oracle;
  plan.threads = c.threads;

  const auto t0 = std::chrono::steady_clock::now();
  const auto report = run_experiment(plan);

  ordered_json j;
  j["metadata"] = metadata(c, "experiment", kLossPositive, names(plan.approaches));
  j["metadata"]["replications"] = plan.replications;
  j["metadata"]["n"] = plan.n;
  j["metadata"]["holdout"] = plan.holdout;
  j["metadata"]["burn_in"] = plan.simulation.burn_in;
  j["metadata"]["lambda"] = plan.lambda;
  j["metadata"]["oracle"] = plan.oracle;
  j["metadata"]["stream_layout"] = "replication i of model m uses stream m * replications + i";
  j["models"] = ordered_json::array();

  std::string txt;
  for (std::size_t m = 0; m < report.models.size(); ++m) {
    const auto& s = report.models[m];
    ordered_json mj{{"name", s.name}, {"spec", spec_json(plan.models[m].spec)}, {"mean_true_var", s.mean_true_var},
                    {"mean_realized_return", s.mean_realized_return}, {"unreliable", s.unreliable}};
    mj["cells"] = ordered_json::array();
    for (const auto& cell : s.cells) {
      mj["cells"].push_back({{"approach", to_string(cell.approach)}, {"level", cell.level}, {"count", cell.count},
                             {"failures", cell.failures}, {"unconverged", cell.unconverged}, {"mean", cell.mean},
                             {"mse_true", cell.mse_true}, {"mse_realized", cell.mse_realized}});
    }
    j["models"].push_back(mj);

    txt += fmt("Model %s (n = %zu, %zu replications)%s\n", s.name.c_str(), plan.n, plan.replications,
               s.unreliable ? "  [unreliable: >10% failed fits]" : "");
    for (std::size_t l = 0; l < plan.levels.size(); ++l) {
      txt += fmt("  true VaR_%.2f = %.4f", plan.levels[l], s.mean_true_var[l]);
    }
    txt += "\n";
    txt += fmt("%-12s", "approach");
    for (double p : plan.levels) txt += fmt(" %10s %10s %10s", fmt("mean %.2f", p).c_str(), "mse", "mse(r)");
    txt += fmt(" %6s %6s\n", "fail", "noconv");
    for (std::size_t a = 0; a < plan.approaches.size(); ++a) {
      txt += fmt("%-12s", std::string(to_string(plan.approaches[a])).c_str());
      std::size_t fail = 0, nc = 0;
      for (std::size_t l = 0; l < plan.levels.size(); ++l) {
        const auto& cell = s.cells[a * plan.levels.size() + l];
        txt += fmt(" %10.4f %10.4f %10.4f", cell.mean, cell.mse_true, cell.mse_realized);
        fail = cell.failures;
        nc = cell.unconverged;
      }
      txt += fmt(" %6zu %6zu\n", fail, nc);
    }
    txt += "\n";
  }

  if (c.forecast) {
    const auto fr = forecast_experiment(plan);
    j["forecast"] = ordered_json::array();
    for (const auto& s : fr.models) {
      ordered_json mj{{"name", s.name}, {"failures", s.failures}, {"unconverged", s.unconverged}};
      mj["cells"] = ordered_json::array();
      txt += fmt("Volatility forecast mse, model %s\n%4s %12s %12s %12s %12s\n", s.name.c_str(), "h", "mean sigma",
                 "mean s_hat", "mse sigma", "mse X^2");
      for (const auto& cell : s.cells) {
        mj["cells"].push_back({{"h", cell.h}, {"count", cell.count}, {"mse_sigma", cell.mse_sigma},
                               {"mse_x2", cell.mse_x2}, {"mean_sigma", cell.mean_sigma},
                               {"mean_sigma_hat", cell.mean_sigma_hat}});
        txt += fmt("%4zu %12.4f %12.4f %12.4f %12.4f\n", cell.h, cell.mean_sigma, cell.mean_sigma_hat,
                   cell.mse_sigma, cell.mse_x2);
      }
      txt += "\n";
      j["forecast"].push_back(mj);
    }
  }

  const auto dir = prepare_out(c);
  write_json(dir / "experiment.json", j);
  write_file(dir / "experiment.txt", txt);
  out << txt;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  err << fmt("runtime %.1f s\n", secs);
  return 0;
}

int exit_code(ErrorKind k) { return 10 + static_cast<int>(k); }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"FIEGARCH volatility and risk toolkit", "fierisk"};
  app.set_version_flag("--version", std::string(kLibraryName) + " " + std::string(kLibraryVersion));
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"simulate", "simulate a reference model path"},
      {"fit", "fit ARMA-FIEGARCH models by QMLE and rank them"},
      {"forecast", "forecast the conditional mean and volatility"},
      {"risk", "VaR and ES under each approach"},
      {"maxloss", "MaxLoss and worst-case scenario"},
      {"experiment", "Monte Carlo VaR study"}};
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, r;
    const int code = app.exit(e, o, r);
    out << o.str();
    err << r.str();
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const Config config = resolve(flags, command);
    if (command == "simulate") return cmd_simulate(config, out);
    if (command == "fit") return cmd_fit(config, out);
    if (command == "forecast") return cmd_forecast(config, out);
    if (command == "risk") return cmd_risk(config, out);
    if (command == "maxloss") return cmd_maxloss(config, out);
    return cmd_experiment(config, out, err);
  } catch (const Error& e) {
    err << "fierisk: error [" << to_string(e.kind()) << "] " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "fierisk: error [internal] " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace fierisk::cli
