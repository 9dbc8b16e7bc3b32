#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "fierisk/error.hpp"
#include "fierisk/estimation.hpp"
#include "fierisk/fiegarch.hpp"
#include "fierisk/rng.hpp"

using namespace fierisk;

namespace {

std::vector<double> gaussian(std::uint64_t seed, std::size_t n, double sd = 1.0) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = sd * rng.normal();
  return v;
}

JointSpec flat_spec(double omega) {
  FiegarchParams p;
  p.omega = omega;
  p.beta = {0.5};
  return JointSpec{ArmaSpec{}, FiegarchSpec(p)};
}

JointSpec with_theta_gamma(const FiegarchSpec& spec, double theta, double gamma) {
  auto p = spec.params();
  p.theta = theta;
  p.gamma = gamma;
  return JointSpec{ArmaSpec{}, FiegarchSpec(p)};
}

SimulationOptions sim(std::size_t n) {
  SimulationOptions o;
  o.n = n;
  o.burn_in = 2000;
  o.truncation = 20000;
  return o;
}

void check_criteria(const FitResult& f) {
  const double k = static_cast<double>(f.k);
  CHECK(f.k == f.orders.parameter_count());
  CHECK(f.aic == doctest::Approx(-2.0 * f.loglik + 2.0 * k).epsilon(1e-12));
  CHECK(f.bic == doctest::Approx(-2.0 * f.loglik + k * std::log(static_cast<double>(f.n_used))).epsilon(1e-12));
  if (f.converged) CHECK(f.gradient_norm <= 1e-5);
  for (std::size_t i = 1; i < f.trace.size(); ++i) REQUIRE(f.trace[i] <= f.trace[i - 1]);
}

}  // namespace

TEST_CASE("loglik of a homoskedastic model matches the iid Gaussian formula") {
  const auto r = gaussian(3, 3000);
  double ss = 0.0;
  for (double x : r) ss += x * x;
  const double n = static_cast<double>(r.size());
  const double want = -0.5 * n * (std::log(2.0 * std::numbers::pi) + ss / n);
  CHECK(qmle_loglik(flat_spec(0.0), r, 1000, 0) == doctest::Approx(want).epsilon(1e-13));
  CHECK(qmle_loglik(flat_spec(0.0), r, 1000) == qmle_loglik(flat_spec(0.0), r, 1000, 0));

  double tail = 0.0;
  for (std::size_t t = 25; t < r.size(); ++t) tail += std::log(2.0 * std::numbers::pi) + r[t] * r[t];
  CHECK(qmle_loglik(flat_spec(0.0), r, 1000, 25) == doctest::Approx(-0.5 * tail).epsilon(1e-13));
}

TEST_CASE("loglik agrees under both parameterizations") {
  for (const auto& m : reference_models()) {
    CAPTURE(m.name);
    const auto path = simulate(m.spec, sim(3000), SeedRecord{41, 0});
    const ArmaSpec arma(ArmaParams{0.01, {0.2}, {-0.1}});
    std::vector<double> r(path.x.size());
    r = arma_synthesize(arma, path.x);
    // exact while no lag is truncated; past the truncation point the two forms drop different terms
    const double a = qmle_loglik(JointSpec{arma, m.spec}, r, r.size(), 20);
    const double b = qmle_loglik(arma, to_zivot_wang(m.spec), r, r.size(), 20);
    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("loglik evaluation is deterministic") {
  const auto m1 = *reference_model("M1");
  const auto path = simulate(m1, sim(2000), SeedRecord{42, 0});
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    auto p = m1.params();
    p.theta = 0.3 * rng.normal();
    p.gamma = 0.3 * std::abs(rng.normal());
    p.d = 0.9 * rng.uniform() - 0.45;
    p.beta = {0.9 * rng.uniform()};
    const JointSpec spec{ArmaSpec{}, FiegarchSpec(p)};
    const double a = qmle_loglik(spec, path.x, 1000, 20);
    const double b = qmle_loglik(spec, path.x, 1000, 20);
    CHECK(std::isfinite(a));
    CHECK(a == b);
  }
}

TEST_CASE("true volatility parameters dominate a homoskedastic model") {
  const auto m1 = *reference_model("M1");
  const auto null_spec = with_theta_gamma(m1, 0.0, 0.0);
  const JointSpec truth{ArmaSpec{}, m1};
  int wins = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto path = simulate(m1, sim(5000), SeedRecord{1000, s});
    if (qmle_loglik(truth, path.x, 1000, 20) > qmle_loglik(null_spec, path.x, 1000, 20)) ++wins;
  }
  CHECK(wins >= 95);
}

TEST_CASE("parameter map round trips") {
  Rng rng(77);
  const std::vector<ModelOrders> layouts{
      {0, 0, 0, 1, true, true}, {1, 1, 1, 1, true, true}, {2, 1, 0, 2, true, false},
      {3, 3, 1, 1, false, true}, {0, 2, 2, 3, true, true}, {1, 0, 0, 0, true, true}};
  for (const auto& o : layouts) {
    CAPTURE(o.label());
    const ParameterMap map(o);
    int decoded = 0;
    for (int i = 0; i < 200; ++i) {
      std::vector<double> u(map.size());
      for (auto& v : u) v = rng.normal();
      const auto spec = map.decode(u);
      if (!spec) continue;
      ++decoded;
      const auto back = map.encode(*spec);
      REQUIRE(back.size() == u.size());
      for (std::size_t j = 0; j < u.size(); ++j) REQUIRE(std::abs(back[j] - u[j]) <= 1e-12 * std::max(1.0, std::abs(u[j])));
      const auto again = map.decode(back);
      REQUIRE(again);
      auto close = [](std::span<const double> x, std::span<const double> y) {
        REQUIRE(x.size() == y.size());
        for (std::size_t j = 0; j < x.size(); ++j) REQUIRE(std::abs(x[j] - y[j]) <= 1e-12);
      };
      const auto& f0 = spec->fiegarch;
      const auto& f1 = again->fiegarch;
      close(std::vector{f0.omega(), f0.theta(), f0.gamma(), f0.d(), spec->arma.mean()},
            std::vector{f1.omega(), f1.theta(), f1.gamma(), f1.d(), again->arma.mean()});
      close(f0.alpha(), f1.alpha());
      close(f0.beta(), f1.beta());
      close(spec->arma.ar(), again->arma.ar());
      close(spec->arma.ma(), again->arma.ma());
    }
    CHECK(decoded > 50);
  }
}

TEST_CASE("fit on homoskedastic data") {
  const auto r = gaussian(8, 2000, 2.0);
  double mean = 0.0;
  for (double x : r) mean += x;
  mean /= static_cast<double>(r.size());
  double var = 0.0;
  for (double x : r) var += (x - mean) * (x - mean);
  var /= static_cast<double>(r.size() - 1);

  const auto f = fit(ModelOrders{0, 0, 0, 1, true, true}, r);
  check_criteria(f);
  CHECK(std::abs(f.spec.fiegarch.gamma()) <= 0.1);
  CHECK(std::abs(f.spec.fiegarch.omega() - std::log(var)) <= 0.1);
  CHECK(f.n_used == r.size() - f.skip);
  CHECK(f.skip == 20);
}

TEST_CASE("fit is deterministic and reports diagnostics") {
  const auto m1 = *reference_model("M1");
  const auto path = simulate(m1, sim(1500), SeedRecord{9, 9});
  const ModelOrders o{0, 0, 0, 1, true, false};
  const auto a = fit(o, path.x);
  const auto b = fit(o, path.x);
  check_criteria(a);
  CHECK(a.loglik == b.loglik);
  CHECK(a.iterations == b.iterations);
  CHECK(a.spec.fiegarch.d() == b.spec.fiegarch.d());
  CHECK(a.iterations > 0);
  CHECK(!a.trace.empty());
  CHECK(a.loglik == doctest::Approx(qmle_loglik(a.spec, path.x, a.truncation, a.skip)).epsilon(1e-9));
}

TEST_CASE("fit rejects invalid orders and data") {
  const auto r = gaussian(1, 500);
  CHECK_THROWS_AS(fit(ModelOrders{6, 0, 0, 1}, r), Error);
  CHECK_THROWS_AS(fit(ModelOrders{0, 0, 6, 1}, r), Error);
  auto bad = r;
  bad[3] = NAN;
  CHECK_THROWS_AS(fit(ModelOrders{}, bad), Error);
  CHECK_THROWS_AS(fit(ModelOrders{3, 3, 1, 1}, std::vector<double>(r.begin(), r.begin() + 50)), Error);
}

TEST_CASE("single candidate selection returns it") {
  const auto r = gaussian(2, 800);
  const std::vector<ModelOrders> one{{0, 0, 0, 1, false, true}};
  const auto s = model_select(one, r, {}, 1);
  REQUIRE(s.ranked.size() == 1);
  CHECK(s.ranked[0].orders == one[0]);
  CHECK(s.failures.empty());
}

TEST_CASE("nested candidates on null data favour the smaller model") {
  const auto r = gaussian(21, 2000);
  const std::vector<ModelOrders> c{{0, 0, 1, 1, false, false}, {0, 0, 0, 1, false, false}};
  const auto s = model_select(c, r, {}, 2);
  REQUIRE(s.ranked.size() == 2);
  CHECK(s.ranked[0].orders == c[1]);
  CHECK(s.ranked[0].bic <= s.ranked[1].bic);
}

TEST_CASE("selection prefers the generating EGARCH order") {
  FiegarchParams p;
  p.omega = 0.0;
  p.beta = {0.9};
  p.alpha = {-0.5};
  p.theta = -0.1;
  p.gamma = 0.35;
  const FiegarchSpec truth(p);
  const std::vector<ModelOrders> c{{0, 0, 0, 1, false, false}, {0, 0, 1, 1, false, false}};
  int correct = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto path = simulate(truth, sim(2000), SeedRecord{555, s});
    const auto sel = model_select(c, path.x, {}, 1);
    if (sel.ranked.front().orders == c[1]) ++correct;
  }
  CHECK(correct > 10);
}

TEST_CASE("Ljung-Box statistic") {
  const std::vector<double> x{1.0, 3.0, 2.0, 5.0, 4.0, 6.0, 2.0, 1.0, 3.0, 4.0};
  const std::size_t n = x.size(), lags = 3;
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  double c0 = 0.0;
  for (double v : x) c0 += (v - m) * (v - m);
  double q = 0.0;
  for (std::size_t k = 1; k <= lags; ++k) {
    double ck = 0.0;
    for (std::size_t t = k; t < n; ++t) ck += (x[t] - m) * (x[t - k] - m);
    const double rho = ck / c0;
    q += rho * rho / static_cast<double>(n - k);
  }
  q *= static_cast<double>(n * (n + 2));
  const auto lb = ljung_box(x, lags);
  CHECK(lb.statistic == doctest::Approx(q).epsilon(1e-13));
  const boost::math::chi_squared chi(static_cast<double>(lags));
  CHECK(lb.p_value == doctest::Approx(boost::math::cdf(boost::math::complement(chi, q))).epsilon(1e-10));
  CHECK(lb.lags == lags);
  CHECK_THROWS_AS(ljung_box(x, 0), Error);
  CHECK_THROWS_AS(ljung_box(x, 10), Error);
}

TEST_CASE("ModelOrders labels and counts") {
  CHECK(ModelOrders{0, 0, 0, 1}.label() == "ARMA(0,0)-FIEGARCH(0,d,1)");
  CHECK(ModelOrders{1, 1, 1, 1, false, true}.label() == "ARMA(1,1)-EGARCH(1,1)");
  CHECK(ModelOrders{0, 0, 0, 1, true, true}.parameter_count() == 6);
  CHECK(ModelOrders{0, 0, 0, 1, true, false}.parameter_count() == 5);
  CHECK(ModelOrders{2, 1, 1, 1, false, true}.parameter_count() == 9);
}
