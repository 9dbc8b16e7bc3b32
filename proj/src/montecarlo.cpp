#include "fierisk/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>

#include "fierisk/error.hpp"
#include "fierisk/special.hpp"

namespace fierisk {
namespace {

constexpr std::string_view kModule = "montecarlo";

struct ArmOutcome {
  std::vector<double> estimate;  // per level; empty on failure
  bool converged = true;
};

struct Replication {
  std::vector<double> true_var;
  double realized = 0.0;
  std::vector<ArmOutcome> arms;  // per approach
};

std::vector<Rng> make_streams(std::uint64_t seed, std::size_t count, bool separate) {
  Rng base(seed);
  if (separate) base.long_jump();
  std::vector<Rng> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(base);
    base.jump();
  }
  return out;
}

// The generating process has no mean equation, so none is fitted.
ModelOrders generating_orders(const FiegarchSpec& spec) {
  return ModelOrders{0, 0, spec.p(), spec.q(), true, false};
}

ModelOrders egarch_orders() { return ModelOrders{0, 0, 1, 1, false, false}; }

double sample_mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
  const double m = sample_mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

ArmOutcome run_arm(Approach approach, const ExperimentPlan& plan, const FiegarchSpec& truth,
                   std::span<const double> sample) {
  ArmOutcome out;
  std::vector<double> est;
  est.reserve(plan.levels.size());
  std::vector<double> losses(sample.size());
  switch (approach) {
    case Approach::Empirical:
      std::transform(sample.begin(), sample.end(), losses.begin(), [](double v) { return -v; });
      for (double p : plan.levels) est.push_back(var_empirical(losses, p).value);
      break;
    case Approach::Normal: {
      const double mu = sample_mean(sample), sd = sample_sd(sample);
      for (double p : plan.levels) est.push_back(var_normal(-mu, sd, p).value);
      break;
    }
    case Approach::RiskMetrics:
      for (double p : plan.levels) est.push_back(var_riskmetrics(sample, p, 1, plan.lambda).value);
      break;
    case Approach::Egarch:
    case Approach::Fiegarch: {
      const bool fractional = approach == Approach::Fiegarch;
      if (plan.oracle && fractional) {
        const JointSpec spec{ArmaSpec{}, truth};
        for (double p : plan.levels) {
          est.push_back(var_econometric(spec, sample, p, 1, plan.fit.truncation).value);
        }
        break;
      }
      const auto result = fit(fractional ? generating_orders(truth) : egarch_orders(), sample, plan.fit);
      out.converged = result.converged;
      for (double p : plan.levels) est.push_back(var_econometric(result, sample, p, 1, true).value);
      break;
    }
    case Approach::MaxLoss:
      throw Error(ErrorKind::InvalidArgument, kModule, "MaxLoss is not a Monte Carlo VaR approach");
  }
  if (all_finite(est)) out.estimate = std::move(est);
  return out;
}

Replication run_replication(const ExperimentPlan& plan, const FiegarchSpec& truth, Rng rng) {
  SimulationOptions sim = plan.simulation;
  sim.n = plan.n;
  const auto path = simulate(truth, sim, rng);
  const std::size_t used = plan.n - plan.holdout;
  const std::span<const double> sample(path.x.data(), used);

  Replication rep;
  const double sigma_next = std::sqrt(path.sigma2[used]);
  for (double p : plan.levels) rep.true_var.push_back(special::normal_quantile(p) * sigma_next);
  rep.realized = path.x[used];
  for (Approach a : plan.approaches) {
    try {
      rep.arms.push_back(run_arm(a, plan, truth, sample));
    } catch (const Error&) {
      rep.arms.push_back(ArmOutcome{{}, false});
    }
  }
  return rep;
}

ModelSummary summarize(const ExperimentPlan& plan, const std::string& name,
                       const std::vector<Replication>& reps) {
  ModelSummary s;
  s.name = name;
  const std::size_t levels = plan.levels.size();
  const double k = static_cast<double>(reps.size());
  s.mean_true_var.assign(levels, 0.0);
  for (const auto& r : reps) {
    for (std::size_t l = 0; l < levels; ++l) s.mean_true_var[l] += r.true_var[l] / k;
    s.mean_realized_return += r.realized / k;
  }

  for (std::size_t a = 0; a < plan.approaches.size(); ++a) {
    for (std::size_t l = 0; l < levels; ++l) {
      CellSummary c;
      c.approach = plan.approaches[a];
      c.level = plan.levels[l];
      std::vector<double> est, err_true, err_real;
      for (const auto& r : reps) {
        const auto& arm = r.arms[a];
        if (arm.estimate.empty()) {
          ++c.failures;
          continue;
        }
        if (!arm.converged) ++c.unconverged;
        est.push_back(arm.estimate[l]);
        err_true.push_back(arm.estimate[l] - r.true_var[l]);
        err_real.push_back(arm.estimate[l] + r.realized);
      }
      c.count = est.size();
      if (c.count > 0) {
        c.mean = sample_mean(est);
        c.mse_true = mse(err_true);
        c.mse_realized = mse(err_real);
      }
      if (static_cast<double>(c.failures) > 0.1 * k) s.unreliable = true;
      s.cells.push_back(c);
    }
  }
  return s;
}

}  // namespace

void validate(const ExperimentPlan& plan) {
  if (plan.models.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "no models in the plan");
  if (plan.replications == 0) throw Error(ErrorKind::InvalidArgument, kModule, "replications must be >= 1");
  if (plan.holdout == 0 || plan.holdout >= plan.n) {
    throw Error(ErrorKind::InvalidArgument, kModule, "holdout must lie in [1, n)");
  }
  if (plan.horizons == 0 || plan.horizons > plan.holdout) {
    throw Error(ErrorKind::InvalidArgument, kModule, "forecast horizons must lie in [1, holdout]");
  }
  if (plan.levels.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "no levels in the plan");
  for (double p : plan.levels) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::Domain, kModule, "level must lie in (0, 1)");
  }
  if (plan.approaches.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "no approaches in the plan");
  for (Approach a : plan.approaches) {
    if (a == Approach::MaxLoss) {
      throw Error(ErrorKind::InvalidArgument, kModule, "MaxLoss is not a Monte Carlo VaR approach");
    }
  }
}

double mse(std::span<const double> errors) {
  if (errors.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "mse of an empty series");
  double s = 0.0;
  for (double e : errors) s += e * e;
  return s / static_cast<double>(errors.size());
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

ExperimentReport run_experiment(const ExperimentPlan& plan) {
  validate(plan);
  const std::size_t reps = plan.replications;
  const auto streams = make_streams(plan.master_seed, plan.models.size() * reps, false);

  ExperimentReport report{plan, {}};
  for (std::size_t m = 0; m < plan.models.size(); ++m) {
    const auto& model = plan.models[m];
    std::vector<Replication> results(reps);
    parallel_for(reps, plan.threads, [&](std::size_t i) {
      results[i] = run_replication(plan, model.spec, streams[m * reps + i]);
    });
    report.models.push_back(summarize(plan, model.name, results));
  }
  return report;
}

ForecastReport forecast_experiment(const ExperimentPlan& plan) {
  validate(plan);
  const std::size_t reps = plan.replications;
  const std::size_t hmax = plan.horizons;
  const auto streams = make_streams(plan.master_seed, plan.models.size() * reps, true);

  struct Outcome {
    bool ok = false;
    bool converged = true;
    std::vector<double> sigma, sigma_hat2, x2;
  };

  ForecastReport report{plan, {}};
  for (std::size_t m = 0; m < plan.models.size(); ++m) {
    const auto& model = plan.models[m];
    std::vector<Outcome> results(reps);
    parallel_for(reps, plan.threads, [&](std::size_t i) {
      Rng rng = streams[m * reps + i];
      SimulationOptions sim = plan.simulation;
      sim.n = plan.n;
      const auto path = simulate(model.spec, sim, rng);
      const std::size_t used = plan.n - plan.holdout;
      const std::span<const double> sample(path.x.data(), used);
      Outcome o;
      try {
        std::vector<double> s2;
        if (plan.oracle) {
          s2 = forecast(JointSpec{ArmaSpec{}, model.spec}, sample, hmax, plan.fit.truncation).sigma2;
        } else {
          const auto result = fit(generating_orders(model.spec), sample, plan.fit);
          o.converged = result.converged;
          s2 = forecast(result.spec, sample, hmax, result.truncation).sigma2;
        }
        if (all_finite(s2)) {
          o.ok = true;
          o.sigma_hat2 = std::move(s2);
          for (std::size_t h = 0; h < hmax; ++h) {
            o.sigma.push_back(std::sqrt(path.sigma2[used + h]));
            o.x2.push_back(path.x[used + h] * path.x[used + h]);
          }
        }
      } catch (const Error&) {
      }
      results[i] = std::move(o);
    });

    ForecastSummary s;
    s.name = model.name;
    for (std::size_t h = 0; h < hmax; ++h) {
      ForecastCell c;
      c.h = h + 1;
      std::vector<double> es, ex;
      double sum_sigma = 0.0, sum_hat = 0.0;
      for (const auto& o : results) {
        if (!o.ok) continue;
        const double hat = std::sqrt(o.sigma_hat2[h]);
        es.push_back(o.sigma[h] - hat);
        ex.push_back(o.x2[h] - o.sigma_hat2[h]);
        sum_sigma += o.sigma[h];
        sum_hat += hat;
      }
      c.count = es.size();
      if (c.count > 0) {
        c.mse_sigma = mse(es);
        c.mse_x2 = mse(ex);
        c.mean_sigma = sum_sigma / static_cast<double>(c.count);
        c.mean_sigma_hat = sum_hat / static_cast<double>(c.count);
      }
      s.cells.push_back(c);
    }
    for (const auto& o : results) {
      if (!o.ok) ++s.failures;
      if (o.ok && !o.converged) ++s.unconverged;
    }
    report.models.push_back(std::move(s));
  }
  return report;
}

}  // namespace fierisk
