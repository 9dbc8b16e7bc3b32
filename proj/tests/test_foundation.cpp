// Special functions, RNG and lag-polynomial helpers. Quantiles are checked
// against Boost.Math.

#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <vector>

#include "fierisk/error.hpp"
#include "fierisk/polynomial.hpp"
#include "fierisk/rng.hpp"
#include "fierisk/special.hpp"

using namespace fierisk;

TEST_CASE("normal quantile matches Boost to 1e-8") {
  const boost::math::normal_distribution<double> n01;
  std::vector<double> grid{1e-300, 1e-100, 1e-20, 1e-12, 1e-8, 1e-4, 0.001, 0.01, 0.02425, 0.025, 0.05, 0.1,
                           0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 0.95, 0.975, 0.99, 0.999, 1 - 1e-6, 1 - 1e-10};
  for (int k = 1; k < 1000; ++k) grid.push_back(k / 1000.0);
  for (double p : grid) {
    CAPTURE(p);
    const double q = boost::math::quantile(n01, p);
    CHECK(std::abs(special::normal_quantile(p) - q) <= 1e-8 * std::max(1.0, std::abs(q) * 1e-2));
  }
  CHECK(special::normal_quantile(0.5) == 0.0);
  CHECK_THROWS_AS(special::normal_quantile(0.0), Error);
  CHECK_THROWS_AS(special::normal_quantile(1.0), Error);
  CHECK_THROWS_AS(special::normal_quantile(std::nan("")), Error);
}

TEST_CASE("normal cdf and pdf match Boost") {
  const boost::math::normal_distribution<double> n01;
  for (double x = -12.0; x <= 12.0; x += 0.37) {
    CHECK(special::normal_cdf(x) == doctest::Approx(boost::math::cdf(n01, x)).epsilon(1e-13));
    CHECK(special::normal_pdf(x) == doctest::Approx(boost::math::pdf(n01, x)).epsilon(1e-13));
  }
}

TEST_CASE("chi-square quantile matches Boost to 1e-8") {
  for (int dof = 1; dof <= 12; ++dof) {
    const boost::math::chi_squared_distribution<double> chi(dof);
    for (double p : {1e-6, 0.001, 0.01, 0.05, 0.1, 0.25, 0.5, 0.55, 0.75, 0.9, 0.95, 0.975, 0.99, 0.999, 1 - 1e-8}) {
      CAPTURE(dof);
      CAPTURE(p);
      const double q = boost::math::quantile(chi, p);
      CHECK(std::abs(special::chi2_quantile(p, dof) - q) <= 1e-8 * std::max(1.0, q));
      CHECK(special::chi2_cdf(q, dof) == doctest::Approx(p).epsilon(1e-12));
    }
  }
  CHECK(special::chi2_quantile(0.95, 1) == doctest::Approx(3.841458820694124).epsilon(1e-12));
  CHECK_THROWS_AS(special::chi2_quantile(0.95, 0.0), Error);
  CHECK_THROWS_AS(special::chi2_quantile(1.0, 3.0), Error);
}

TEST_CASE("incomplete gamma complements sum to one") {
  for (double a : {0.5, 1.0, 2.5, 10.0, 50.0}) {
    for (double x : {0.01, 0.5, 1.0, 3.0, 10.0, 60.0}) {
      CHECK(special::gamma_p(a, x) + special::gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  CHECK(special::gamma_p(1.0, 2.0) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("rng is deterministic and streams are jump-separated") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next() == b.next());

  Rng seq(7);
  seq.jump();
  seq.jump();
  Rng direct = Rng::from_stream(7, 2);
  CHECK(direct.record().stream == 2);
  CHECK(seq.record().stream == 2);
  for (int i = 0; i < 100; ++i) REQUIRE(seq.next() == direct.next());

  Rng s0 = Rng::from_stream(7, 0), s1 = Rng::from_stream(7, 1);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += s0.next() == s1.next();
  CHECK(equal == 0);
}

TEST_CASE("rng uniform and normal moments") {
  Rng rng(2024);
  const int n = 200000;
  double su = 0.0, sn = 0.0, sn2 = 0.0, sn4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    sn4 += z * z * z * z;
  }
  CHECK(std::abs(su / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sn / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(sn2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(sn4 / n - 3.0) < 4.0 * std::sqrt(96.0 / n));
}

TEST_CASE("root moduli and stability checks") {
  const std::vector<double> c{1.0, -0.5};
  CHECK(min_root_modulus(c) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(is_stable_ar(std::vector<double>{0.5}));
  CHECK_FALSE(is_stable_ar(std::vector<double>{1.0}));
  CHECK_FALSE(is_stable_ar(std::vector<double>{1.2}));
  CHECK(is_stable_ar(std::vector<double>{}));
  CHECK(is_stable_ma(std::vector<double>{-0.078}));
  CHECK_FALSE(is_stable_ma(std::vector<double>{-1.0}));
  // M3 beta polynomial is stable
  CHECK(is_stable_ar(std::vector<double>{0.22, 0.18, 0.47, -0.45}));
  // (1 - 0.9z)(1 - 1.05 z) has a root inside
  CHECK_FALSE(is_stable_ar(std::vector<double>{1.95, -0.945}));
}

TEST_CASE("pacf transform round trip on random stable polynomials") {
  Rng rng(99);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t k = 1 + rep % 5;
    std::vector<double> pacf(k);
    for (auto& v : pacf) v = 1.98 * rng.uniform() - 0.99;
    const auto phi = pacf_to_ar(pacf);
    REQUIRE(is_stable_ar(phi));
    const auto back = ar_to_pacf(phi);
    REQUIRE(back.size() == k);
    for (std::size_t i = 0; i < k; ++i) CHECK(back[i] == doctest::Approx(pacf[i]).epsilon(1e-12));
  }
  CHECK(ar_to_pacf(std::vector<double>{1.2}).empty());
}
