#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fierisk/error.hpp"
#include "fierisk/fiegarch.hpp"

using namespace fierisk;

namespace {

const double kEAbs = std::sqrt(2.0 / std::numbers::pi);

SimulationOptions opts(std::size_t n, std::size_t burn, std::size_t m) {
  SimulationOptions o;
  o.n = n;
  o.burn_in = burn;
  o.truncation = m;
  return o;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("g_transform examples") {
  CHECK(g_transform(0.0, -0.14, 0.38, kEAbs) == doctest::Approx(-0.38 * kEAbs).epsilon(1e-15));
  CHECK(g_transform(0.0, -0.14, 0.38, kEAbs) == doctest::Approx(-0.3031961).epsilon(1e-7));
  for (double z : {-3.0, -0.2, 0.0, 1.7}) CHECK(g_transform(z, 0.0, 0.0, kEAbs) == 0.0);
  CHECK(g_transform(1.0, 1.0, 0.0, 123.0) == 1.0);
}

TEST_CASE("to_zivot_wang examples") {
  const auto m1 = to_zivot_wang(*reference_model("M1")).params();
  REQUIRE(m1.psi.size() == 1);
  CHECK(m1.psi[0] == doctest::Approx(0.38));
  CHECK(m1.gamma_zw[0] == doctest::Approx(-0.14));
  CHECK(m1.a == doctest::Approx(-0.3031961).epsilon(1e-7));

  FiegarchParams zero;
  zero.beta = {0.3};
  const auto z = to_zivot_wang(FiegarchSpec(zero)).params();
  CHECK(z.a == 0.0);
  CHECK(z.psi[0] == 0.0);
  CHECK(z.gamma_zw[0] == 0.0);

  const auto m2 = to_zivot_wang(*reference_model("M2")).params();
  REQUIRE(m2.psi.size() == 2);
  CHECK(m2.psi[0] == doctest::Approx(0.38));
  CHECK(m2.psi[1] == doctest::Approx(-0.304));
  CHECK(m2.gamma_zw[0] == doctest::Approx(0.04));
  CHECK(m2.gamma_zw[1] == doctest::Approx(-0.032));
  CHECK(m2.a == doctest::Approx(-0.38 * (1 - 0.80) * kEAbs).epsilon(1e-14));
}

TEST_CASE("from_zivot_wang inverts to_zivot_wang") {
  for (const auto& m : reference_models()) {
    const auto back = from_zivot_wang(to_zivot_wang(m.spec));
    CHECK(back.theta() == doctest::Approx(m.spec.theta()).epsilon(1e-14));
    CHECK(back.gamma() == doctest::Approx(m.spec.gamma()).epsilon(1e-14));
    REQUIRE(back.p() == m.spec.p());
    for (std::size_t i = 0; i < back.p(); ++i) CHECK(back.alpha()[i] == doctest::Approx(m.spec.alpha()[i]));
  }
  ZivotWangParams bad;
  bad.psi = {0.4, 0.1};
  bad.gamma_zw = {-0.1, 0.3};
  CHECK_THROWS_AS(from_zivot_wang(ZivotWangSpec(bad)), Error);
}

TEST_CASE("simulate with theta = gamma = 0 gives constant volatility") {
  FiegarchParams p;
  p.beta = {0.5};
  p.d = 0.3;
  p.omega = 0.7;
  const auto path = simulate(FiegarchSpec(p), opts(500, 100, 2000), SeedRecord{1, 0});
  for (double s : path.sigma2) REQUIRE(s == doctest::Approx(std::exp(0.7)).epsilon(1e-15));

  p.omega = 0.0;
  const auto iid = simulate(FiegarchSpec(p), opts(500, 100, 2000), SeedRecord{1, 0});
  for (std::size_t t = 0; t < iid.n; ++t) REQUIRE(iid.x[t] == iid.z[t]);
}

TEST_CASE("simulated path satisfies X = sigma Z and sigma^2 > 0") {
  for (const auto& m : reference_models()) {
    const auto path = simulate(m.spec, opts(1000, 500, 5000), SeedRecord{3, 1});
    REQUIRE(path.x.size() == 1000);
    for (std::size_t t = 0; t < path.n; ++t) {
      REQUIRE(path.sigma2[t] > 0.0);
      REQUIRE(std::abs(path.x[t] - std::sqrt(path.sigma2[t]) * path.z[t]) <= 1e-12 * (1.0 + std::abs(path.x[t])));
    }
  }
}

TEST_CASE("M1 moments") {
  const auto m1 = *reference_model("M1");
  const auto path = simulate(m1, opts(2000, 2000, 50000), SeedRecord{12345, 0});
  // ln sigma^2 is strongly autocorrelated; use the variance of the infinite MA as a bound
  const auto lam = lambda_coeffs(m1, 50000);
  double ss = 0.0;
  for (double l : lam.coeffs()) ss += l * l;
  const double var_g = 0.14 * 0.14 + 0.38 * 0.38 * (1.0 - 2.0 / std::numbers::pi);
  const double sd_ls = std::sqrt(var_g * ss);
  // effective sample size of a long-memory series is small; one path gives one draw of the mean
  CHECK(std::abs(mean(path.log_sigma2)) < 3.0 * sd_ls);

  std::vector<double> g(path.n);
  for (std::size_t t = 0; t < path.n; ++t) g[t] = g_transform(path.z[t], -0.14, 0.38, kEAbs);
  const double mg = mean(g);
  double vg = 0.0;
  for (double v : g) vg += (v - mg) * (v - mg);
  vg /= static_cast<double>(g.size() - 1);
  // relative se of a sample variance of g is about sqrt((kurtosis - 1) / n) ~ 0.035
  CHECK(std::abs(vg / var_g - 1.0) < 0.15);
}

TEST_CASE("both parameterizations simulate the same log-volatility") {
  for (const auto& m : reference_models()) {
    CAPTURE(m.name);
    const auto o = opts(2000, 500, 5000);
    const auto a = simulate(m.spec, o, SeedRecord{77, 3});
    const auto b = simulate_zw(to_zivot_wang(m.spec), o, SeedRecord{77, 3});
    double sup = 0.0;
    for (std::size_t t = 0; t < a.n; ++t) sup = std::max(sup, std::abs(a.log_sigma2[t] - b.log_sigma2[t]));
    CHECK(sup <= 1e-10);
  }
}

TEST_CASE("simulate_zw special cases") {
  ZivotWangParams zero;
  zero.psi = {0.0};
  zero.gamma_zw = {0.0};
  zero.beta = {0.4};
  zero.d = 0.2;
  const auto flat = simulate_zw(ZivotWangSpec(zero), opts(300, 50, 1000), SeedRecord{2, 0});
  for (double s : flat.sigma2) REQUIRE(s == 1.0);

  ZivotWangParams one;
  one.a = -0.2;
  one.psi = {1.0};
  one.gamma_zw = {0.0};
  const auto path = simulate_zw(ZivotWangSpec(one), opts(300, 0, 100), SeedRecord{2, 0});
  CHECK(path.log_sigma2[0] == doctest::Approx(-0.2 + kEAbs).epsilon(1e-15));
  for (std::size_t t = 1; t < path.n; ++t) {
    REQUIRE(path.log_sigma2[t] == doctest::Approx(-0.2 + std::abs(path.z[t - 1])).epsilon(1e-15));
  }
}

TEST_CASE("simulation is deterministic") {
  const auto m3 = *reference_model("M3");
  const auto a = simulate(m3, opts(500, 200, 3000), SeedRecord{9, 4});
  const auto b = simulate(m3, opts(500, 200, 3000), SeedRecord{9, 4});
  for (std::size_t t = 0; t < a.n; ++t) {
    REQUIRE(a.x[t] == b.x[t]);
    REQUIRE(a.sigma2[t] == b.sigma2[t]);
  }
  const auto c = simulate(m3, opts(500, 200, 3000), SeedRecord{9, 5});
  CHECK(a.x[0] != c.x[0]);
}

TEST_CASE("simulate rejects bad lengths") {
  const auto m1 = *reference_model("M1");
  CHECK_THROWS_AS(simulate(m1, opts(0, 10, 10), SeedRecord{}), Error);
  auto o = opts(100, 100, 10);
  o.max_length = 150;
  CHECK_THROWS_AS(simulate(m1, o, SeedRecord{}), Error);
}

TEST_CASE("filter recovers simulated volatility") {
  for (const auto& m : reference_models()) {
    CAPTURE(m.name);
    const std::size_t big_m = 1000;
    const auto path = simulate(m.spec, opts(3000, 0, big_m), SeedRecord{5, 0});
    const auto f = filter_volatility(m.spec, path.x, big_m);
    for (std::size_t t = std::max<std::size_t>(50, big_m / 10); t < path.n; ++t) {
      REQUIRE(std::abs(f.sigma2[t] / path.sigma2[t] - 1.0) <= 1e-8);
    }
    // the forms coincide exactly while no lag is truncated
    const auto fz = filter_volatility_zw(to_zivot_wang(m.spec), path.x, path.n);
    const auto fg = filter_volatility(m.spec, path.x, path.n);
    for (std::size_t t = 0; t < path.n; ++t) REQUIRE(std::abs(fz.log_sigma2[t] - fg.log_sigma2[t]) <= 1e-10);
  }
}

TEST_CASE("filter degenerate inputs") {
  FiegarchParams p;
  p.beta = {0.6};
  p.omega = -0.3;
  p.d = 0.2;
  const std::vector<double> x{0.5, -1.0, 2.0, 0.1};
  const auto f = filter_volatility(FiegarchSpec(p), x, 100);
  for (double s : f.sigma2) CHECK(s == doctest::Approx(std::exp(-0.3)));

  const auto m1 = *reference_model("M1");
  const std::vector<double> zeros(50, 0.0);
  const auto lam = lambda_coeffs(m1, 1000);
  const auto fz = filter_volatility(m1, zeros, 1000);
  const double g0 = g_transform(0.0, m1.theta(), m1.gamma(), kEAbs);
  for (std::size_t t = 0; t < zeros.size(); ++t) {
    double want = m1.omega();
    for (std::size_t k = 0; k + 1 <= t; ++k) want += lam[k] * g0;
    REQUIRE(fz.log_sigma2[t] == doctest::Approx(want).epsilon(1e-13));
    REQUIRE(fz.residuals[t] == 0.0);
  }
  CHECK_THROWS_AS(filter_volatility(m1, std::vector<double>{1.0, NAN}, 10), Error);
}

TEST_CASE("forecast examples") {
  FiegarchParams flat;
  flat.omega = 0.4;
  flat.beta = {0.7};
  const std::vector<double> x{0.3, -0.4, 1.2};
  const auto ff = forecast_volatility(FiegarchSpec(flat), filter_volatility(FiegarchSpec(flat), x, 50), 5);
  for (double s : ff) CHECK(s == doctest::Approx(std::exp(0.4)));

  FiegarchParams eg;
  eg.omega = -0.2;
  eg.beta = {0.8};
  eg.theta = -0.1;
  eg.gamma = 0.3;
  const FiegarchSpec spec(eg);
  const auto path = simulate(spec, opts(400, 0, 1000), SeedRecord{8, 0});
  const auto f = filter_volatility(spec, path.x, 1000);
  const auto fc = forecast_volatility(spec, f, 12);
  const double first = std::log(fc[0]) - eg.omega;
  for (std::size_t h = 1; h <= 12; ++h) {
    CHECK(std::log(fc[h - 1]) - eg.omega == doctest::Approx(std::pow(0.8, h - 1) * first).epsilon(1e-10));
  }
  CHECK_THROWS_AS(forecast_volatility(spec, f, 0), Error);
  CHECK_THROWS_AS(forecast_volatility(spec, f, 2, 999), Error);
}

TEST_CASE("one-step forecast equals the filter extended by one observation") {
  for (const auto& m : reference_models()) {
    const auto path = simulate(m.spec, opts(801, 200, 5000), SeedRecord{21, 2});
    const std::vector<double> head(path.x.begin(), path.x.end() - 1);
    const auto f = filter_volatility(m.spec, head, 1000);
    const auto ext = filter_volatility(m.spec, path.x, 1000);
    CHECK(forecast_volatility(m.spec, f, 1)[0] == doctest::Approx(ext.sigma2.back()).epsilon(1e-14));
  }
}

TEST_CASE("g(Z) is white noise") {
  const auto m1 = *reference_model("M1");
  Rng rng(4711);
  const std::size_t n = 100000;
  std::vector<double> g(n);
  for (auto& v : g) v = g_transform(rng.normal(), m1.theta(), m1.gamma(), kEAbs);
  const double mg = mean(g);
  double c0 = 0.0;
  for (double v : g) c0 += (v - mg) * (v - mg);
  CHECK(std::abs(mg) < 4.0 * std::sqrt(c0 / n) / std::sqrt(static_cast<double>(n)));
  for (std::size_t lag = 1; lag <= 20; ++lag) {
    double c = 0.0;
    for (std::size_t t = lag; t < n; ++t) c += (g[t] - mg) * (g[t - lag] - mg);
    CHECK(std::abs(c / c0) < 4.0 / std::sqrt(static_cast<double>(n)));
  }
}
