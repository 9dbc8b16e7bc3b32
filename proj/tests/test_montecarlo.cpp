#include <doctest.h>

#include <cmath>
#include <vector>

#include "fierisk/error.hpp"
#include "fierisk/montecarlo.hpp"
#include "fierisk/special.hpp"

using namespace fierisk;

namespace {

FiegarchSpec homoskedastic(double omega) {
  FiegarchParams p;
  p.omega = omega;
  p.beta = {0.6};
  p.d = 0.3;
  return FiegarchSpec(p);
}

ExperimentPlan small_plan() {
  ExperimentPlan plan;
  plan.models = {{"M1", *reference_model("M1")}};
  plan.n = 600;
  plan.replications = 6;
  plan.simulation.burn_in = 300;
  plan.simulation.truncation = 2000;
  plan.fit.truncation = 300;
  plan.threads = 2;
  return plan;
}

}  // namespace

TEST_CASE("mse examples") {
  CHECK(mse(std::vector<double>{1, -1}) == 1.0);
  CHECK(mse(std::vector<double>{0, 0, 0}) == 0.0);
  CHECK(mse(std::vector<double>{3, 4}) == 12.5);
  CHECK_THROWS_AS(mse(std::vector<double>{}), Error);
}

TEST_CASE("plan validation") {
  ExperimentPlan plan;
  plan.holdout = plan.n;
  CHECK_THROWS_AS(validate(plan), Error);
  plan = ExperimentPlan{};
  plan.replications = 0;
  CHECK_THROWS_AS(validate(plan), Error);
  plan = ExperimentPlan{};
  plan.approaches = {Approach::MaxLoss};
  CHECK_THROWS_AS(validate(plan), Error);
  plan = ExperimentPlan{};
  plan.levels = {1.0};
  CHECK_THROWS_AS(validate(plan), Error);
  CHECK_NOTHROW(validate(ExperimentPlan{}));
}

TEST_CASE("degenerate model reduces to the Normal estimate of the sample") {
  ExperimentPlan plan;
  const double omega = 0.4;
  plan.models = {{"flat", homoskedastic(omega)}};
  plan.replications = 1;
  plan.approaches = {Approach::Normal};
  plan.simulation.burn_in = 100;
  plan.simulation.truncation = 500;
  const auto report = run_experiment(plan);
  REQUIRE(report.models.size() == 1);
  const auto& m = report.models[0];

  SimulationOptions sim = plan.simulation;
  sim.n = plan.n;
  Rng rng(plan.master_seed);
  const auto path = simulate(plan.models[0].spec, sim, rng);
  const std::size_t used = plan.n - plan.holdout;
  double mean = 0.0;
  for (std::size_t t = 0; t < used; ++t) mean += path.x[t];
  mean /= used;
  double ss = 0.0;
  for (std::size_t t = 0; t < used; ++t) ss += (path.x[t] - mean) * (path.x[t] - mean);
  const double sd = std::sqrt(ss / (used - 1));

  REQUIRE(m.cells.size() == 2);
  for (std::size_t l = 0; l < 2; ++l) {
    const double p = plan.levels[l];
    CHECK(m.mean_true_var[l] == doctest::Approx(special::normal_quantile(p) * std::exp(omega / 2)).epsilon(1e-14));
    CHECK(m.cells[l].mean == doctest::Approx(var_normal(-mean, sd, p).value).epsilon(1e-14));
    CHECK(m.cells[l].count == 1);
    CHECK(m.cells[l].failures == 0);
    CHECK(m.cells[l].mse_true >= 0.0);
  }
  CHECK(m.mean_realized_return == path.x[used]);
}

TEST_CASE("cells do not depend on approach order") {
  auto plan = small_plan();
  plan.approaches = {Approach::Normal, Approach::Empirical, Approach::RiskMetrics};
  const auto a = run_experiment(plan);
  plan.approaches = {Approach::RiskMetrics, Approach::Normal, Approach::Empirical};
  const auto b = run_experiment(plan);
  for (const auto& ca : a.models[0].cells) {
    bool found = false;
    for (const auto& cb : b.models[0].cells) {
      if (cb.approach == ca.approach && cb.level == ca.level) {
        found = true;
        CHECK(cb.mean == ca.mean);
        CHECK(cb.mse_true == ca.mse_true);
        CHECK(cb.mse_realized == ca.mse_realized);
      }
    }
    CHECK(found);
  }
}

TEST_CASE("experiment is reproducible and independent of thread count") {
  auto plan = small_plan();
  plan.replications = 4;
  const auto a = run_experiment(plan);
  plan.threads = 1;
  const auto b = run_experiment(plan);
  REQUIRE(a.models[0].cells.size() == 10);
  for (std::size_t c = 0; c < a.models[0].cells.size(); ++c) {
    CHECK(a.models[0].cells[c].mean == b.models[0].cells[c].mean);
    CHECK(a.models[0].cells[c].mse_true == b.models[0].cells[c].mse_true);
    CHECK(a.models[0].cells[c].failures == b.models[0].cells[c].failures);
    CHECK(a.models[0].cells[c].unconverged == b.models[0].cells[c].unconverged);
  }
  for (double v : a.models[0].mean_true_var) CHECK(v > 0.0);
  plan.master_seed += 1;
  const auto c = run_experiment(plan);
  CHECK(c.models[0].mean_true_var[0] != a.models[0].mean_true_var[0]);
}

TEST_CASE("replication streams follow the documented layout") {
  ExperimentPlan plan;
  plan.models = {{"a", homoskedastic(0.0)}, {"b", homoskedastic(0.0)}};
  plan.replications = 3;
  plan.n = 100;
  plan.approaches = {Approach::Normal};
  plan.simulation.burn_in = 0;
  plan.simulation.truncation = 10;
  const auto r = run_experiment(plan);
  // model b, replication 0 draws from stream 3
  Rng base(plan.master_seed);
  for (int i = 0; i < 3; ++i) base.jump();
  SimulationOptions sim = plan.simulation;
  sim.n = plan.n;
  double realized = 0.0;
  for (int i = 0; i < 3; ++i) {
    Rng s = base;
    for (int j = 0; j < i; ++j) s.jump();
    realized += simulate(plan.models[1].spec, sim, s).x[plan.n - plan.holdout] / 3.0;
  }
  CHECK(r.models[1].mean_realized_return == doctest::Approx(realized).epsilon(1e-15));
}

TEST_CASE("oracle forecasts of a homoskedastic model are exact") {
  ExperimentPlan plan;
  plan.models = {{"flat", homoskedastic(-0.3)}};
  plan.replications = 5;
  plan.n = 400;
  plan.oracle = true;
  plan.simulation.burn_in = 100;
  plan.simulation.truncation = 1000;
  const auto r = forecast_experiment(plan);
  REQUIRE(r.models[0].cells.size() == 10);
  for (const auto& c : r.models[0].cells) {
    CHECK(c.count == 5);
    CHECK(c.mse_sigma == 0.0);
    CHECK(c.mse_x2 > 0.0);
  }
}

TEST_CASE("M1 fitted forecast errors") {
  ExperimentPlan plan;
  plan.models = {{"M1", *reference_model("M1")}};
  plan.replications = 30;
  plan.threads = 2;
  const auto r = forecast_experiment(plan);
  const auto& m = r.models[0];
  CHECK(m.failures <= 3);
  for (const auto& c : m.cells) {
    CAPTURE(c.h);
    CHECK(c.mse_sigma > 0.0);
    CHECK(c.mse_sigma <= 0.3227);
    CHECK(c.mse_x2 > c.mse_sigma);
  }
}
