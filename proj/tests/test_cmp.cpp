#include <doctest.h>

#include <cmath>
#include <random>

#include "mpcmp/cmp.hpp"
#include "oracles.hpp"

using namespace mpcmp;

TEST_CASE("log_normalizer matches direct summation") {
  // sum of 1/r!, r = 0..10 (frozen from a 40-digit summation)
  CHECK(log_normalizer({1.0, 1.0, 10}) == doctest::Approx(0.9999999899522336).epsilon(1e-13));
  CHECK(log_normalizer({3.0, 0.5, 10}) == doctest::Approx(5.367957780332994).epsilon(1e-13));
  CHECK(log_normalizer({0.0, 2.0, 10}) == 0.0);
  for (double lambda : {0.01, 0.1, 1.0, 5.0, 20.0})
    for (double nu : {0.1, 0.5, 1.0, 2.0, 5.0})
      CHECK(log_normalizer({lambda, nu, 10}) ==
            doctest::Approx((double)logl(oracle::G(lambda, nu))).epsilon(1e-12));
}

TEST_CASE("log_normalizer rejects invalid parameters") {
  CHECK_THROWS_AS(log_normalizer({-1.0, 1.0, 10}), std::invalid_argument);
  CHECK_THROWS_AS(log_normalizer({1.0, 0.0, 10}), std::invalid_argument);
  CHECK_THROWS_AS(log_normalizer({1.0, -2.0, 10}), std::invalid_argument);
  CHECK_THROWS_AS(log_normalizer({1.0, 1.0, 0}), std::invalid_argument);
}

TEST_CASE("log_pmf point mass, oracle value and domain errors") {
  CHECK(log_pmf(0, {0.0, 1.0, 10}) == 0.0);
  CHECK(log_pmf(3, {4.0, 1.7, 10}) == doctest::Approx(-1.5603003856200994).epsilon(1e-12));
  CHECK_THROWS_AS(log_pmf(-1, {1.0, 1.0, 10}), std::domain_error);
  CHECK_THROWS_AS(log_pmf(11, {1.0, 1.0, 10}), std::domain_error);
}

TEST_CASE("pmf sums to one across the test grid") {
  for (double lambda : {0.01, 0.1, 1.0, 5.0, 20.0})
    for (double nu : {0.1, 0.5, 1.0, 2.0, 5.0}) {
      double s = 0.0;
      for (int x = 0; x <= 10; ++x) s += std::exp(log_pmf(x, {lambda, nu, 10}));
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("nu = 1 reduces to the renormalized Poisson") {
  for (double lambda : {0.01, 0.1, 1.0, 2.0, 5.0, 20.0})
    for (int x = 0; x <= 10; ++x)
      CHECK(log_pmf(x, {lambda, 1.0, 10}) ==
            doctest::Approx(oracle::trunc_poisson_log_pmf(x, lambda)).epsilon(1e-12));
}

TEST_CASE("mean: limits, truncated-Poisson identity, oracle values") {
  CHECK(cmp_mean({0.0, 1.0, 10}) == 0.0);
  // 2 P(Y<=9)/P(Y<=10), Y ~ Poisson(2), frozen from the closed form
  CHECK(cmp_mean({2.0, 1.0, 10}) == doctest::Approx(1.9999236196641175).epsilon(1e-13));
  CHECK(cmp_mean({6.0, 0.4, 10}) == doctest::Approx(9.345566132481618).epsilon(1e-13));
}

TEST_CASE("mean strictly increasing in lambda") {
  for (double nu : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    double prev = -1.0;
    for (int k = 0; k < 100; ++k) {
      const double lambda = 0.05 * (k + 1);
      const double m = cmp_mean({lambda, nu, 10});
      CHECK(m > prev);
      prev = m;
    }
  }
}

TEST_CASE("variance: limits, oracle, dispersion direction") {
  CHECK(cmp_variance({0.0, 1.0, 10}) == 0.0);
  CHECK(cmp_variance({2.0, 1.0, 10}) == doctest::Approx(1.9993125711431015).epsilon(1e-12));
  CHECK(cmp_variance({2.0, 3.0, 10}) == doctest::Approx(0.4545920105052935).epsilon(1e-12));
  CHECK(cmp_variance({2.0, 3.0, 10}) < cmp_variance({2.0, 1.0, 10}));
}

TEST_CASE("variance decreasing in nu at fixed mean") {
  double prev = HUGE_VAL;
  for (double nu : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double lambda = solve_lambda({2.0, nu, 10});
    const double v = cmp_variance({lambda, nu, 10});
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("solve_lambda round trips and matches the bisection oracle") {
  // mu engineered from a known lambda
  const double mu = cmp_mean({3.0, 1.5, 10});
  CHECK(mu == doctest::Approx(1.8950032415555043).epsilon(1e-13));
  CHECK(solve_lambda({mu, 1.5, 10}) == doctest::Approx(3.0).epsilon(1e-8));

  for (double mu2 : {0.05, 0.5, 1.0, 3.0, 5.0, 8.0, 9.9})
    for (double nu : {0.1, 1.0, 10.0}) {
      const double lambda = solve_lambda({mu2, nu, 10});
      CHECK(std::fabs(cmp_mean({lambda, nu, 10}) - mu2) <= 1e-10);
      CHECK(lambda == doctest::Approx(oracle::bisect_lambda(mu2, nu)).epsilon(1e-8));
    }
}

TEST_CASE("solve_lambda monotone limit and truncation bias") {
  CHECK(solve_lambda({0.001, 1.0, 10}) < solve_lambda({0.01, 1.0, 10}));
  // truncation removes upper-tail mass, so lambda must exceed mu
  const double lambda = solve_lambda({5.0, 1.0, 10});
  CHECK(lambda == doctest::Approx(5.104121794367902).epsilon(1e-10));  // frozen root
  CHECK(lambda > 5.0);
}

TEST_CASE("solve_lambda domain errors") {
  CHECK_THROWS_AS(solve_lambda({0.0, 1.0, 10}), std::domain_error);
  CHECK_THROWS_AS(solve_lambda({10.0, 1.0, 10}), std::domain_error);
  CHECK_THROWS_AS(solve_lambda({-1.0, 1.0, 10}), std::domain_error);
}

TEST_CASE("log-space evaluation stays finite for extreme parameters") {
  for (double lambda : {1e-6, 1.0, 1e3, 1e6})
    for (double nu : {0.05, 1.0, 10.0, 50.0}) {
      CHECK(std::isfinite(log_normalizer({lambda, nu, 10})));
      CHECK(std::isfinite(cmp_mean({lambda, nu, 10})));
      CHECK(std::isfinite(cmp_variance({lambda, nu, 10})));
      for (int x = 0; x <= 10; ++x) CHECK(std::isfinite(log_pmf(x, {lambda, nu, 10})));
    }
}

TEST_CASE("sampling: degenerate case, determinism, frequency match") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 100; ++i) CHECK(cmp_sample({0.0, 1.0, 10}, rng) == 0);

  std::mt19937_64 a(7), b(7);
  for (int i = 0; i < 1000; ++i) CHECK(cmp_sample({2.0, 1.3, 10}, a) == cmp_sample({2.0, 1.3, 10}, b));

  // 1e6 draws at nu=1 vs the truncated Poisson pmf, 4 se per cell
  const int n = 1000000;
  std::vector<int> counts(11, 0);
  std::mt19937_64 r(123);
  for (int i = 0; i < n; ++i) counts[cmp_sample({2.0, 1.0, 10}, r)]++;
  for (int x = 0; x <= 10; ++x) {
    const double p = std::exp(oracle::trunc_poisson_log_pmf(x, 2.0));
    const double se = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::fabs(counts[x] / (double)n - p) <= 4.0 * se + 1e-9);
  }
}
