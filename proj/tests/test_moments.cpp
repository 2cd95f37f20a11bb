// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0

#include "spacings/moments.hpp"

#include "support/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <future>
#include <stdexcept>
#include <vector>

using namespace spacings;

TEST_SUITE("moments") {

TEST_CASE("harmonic numbers are exact and increment by 1/j") {
  HarmonicTable table;
  CHECK(table.harmonic(0) == Rational(0));
  CHECK(table.harmonic(1) == Rational(1));
  CHECK(table.harmonic(2) == Rational(3, 2));
  CHECK(table.harmonic(3) == Rational(11, 6));
  CHECK(table.harmonic(6) == Rational(49, 20));
  for (std::size_t j = 1; j <= 600; ++j) {
    CHECK(table.harmonic(j) - table.harmonic(j - 1) == Rational(1, static_cast<long>(j)));
  }
}

TEST_CASE("harmonic table extends safely under concurrent access") {
  HarmonicTable table;
  std::vector<std::future<Rational>> futures;
  for (int t = 0; t < 8; ++t) {
    futures.push_back(std::async(std::launch::async, [&table, t] {
      Rational last(0);
      for (std::size_t j = 0; j < 400; ++j) last = table.harmonic(j + static_cast<std::size_t>(t) * 37);
      return last;
    }));
  }
  for (auto& f : futures) f.get();
  CHECK(table.harmonic(500) - table.harmonic(499) == Rational(1, 500));
}

TEST_CASE("expected gap values") {
  CHECK(expected_gap({2, 2}) == Rational(5, 18));
  CHECK(expected_gap({9, 1}) == Rational(1, 100));
  for (long n : {1L, 7L, 30L}) {
    CHECK(expected_gap({n, 1}) == Rational(1, (n + 1) * (n + 1)));
    CHECK(expected_gap({n, n + 1}) == HarmonicTable::shared().harmonic(static_cast<std::size_t>(n + 1)) / Rational(n + 1));
    CHECK(expected_gap({n, 0}) == Rational(0));
  }
  CHECK_THROWS_AS(expected_gap({5, 7}), std::domain_error);
}

TEST_CASE("expected gaps partition the interval and increment as 1/((n+1)(n+1-j))") {
  for (long n : {1L, 2L, 5L, 13L, 40L, 60L}) {
    Rational total(0);
    for (long k = 1; k <= n + 1; ++k) total += expected_gap({n, k});
    CHECK(total == Rational(1));
    for (long j = 0; j <= n; ++j) {
      CHECK(expected_gap({n, j + 1}) - expected_gap({n, j}) ==
            Rational(1, (n + 1) * (n + 1 - j)));
    }
  }
}

TEST_CASE("piecewise exact quadrature of the survival function gives the mean") {
  for (long n = 1; n <= 6; ++n) {
    for (long k = 1; k <= n + 1; ++k) {
      CHECK(quad::integrate_survival({n, k}) == expected_gap({n, k}));
    }
  }
}

TEST_CASE("breakpoints list the support thresholds in ascending order") {
  auto bp = Breakpoints::survival_support({4, 3});
  REQUIRE(bp.points.size() == 3);
  CHECK(bp.points[0] == Rational(1, 5));
  CHECK(bp.points[1] == Rational(1, 4));
  CHECK(bp.points[2] == Rational(1, 3));
  CHECK(bp.support_end() == Rational(1, 3));
  CHECK_THROWS_AS(Breakpoints::survival_support({4, 0}), std::domain_error);
}

TEST_CASE("quantile inverts the survival function") {
  auto q = quantile(GapSpec{2, 3}, 0.75);
  CHECK(q.x == doctest::Approx(0.5).epsilon(1e-10));
  auto q2 = quantile(GapSpec{1, 2}, 0.5);
  CHECK(q2.x == doctest::Approx(0.75).epsilon(1e-10));

  // p -> 1 pushes the critical value toward 0
  auto tiny = quantile(GapSpec{6, 4}, 1.0 - 1e-9);
  CHECK(tiny.x < 1e-2);
  CHECK(tiny.x < quantile(GapSpec{6, 4}, 0.5).x);
  CHECK(survival_float({6, 4}, tiny.x).value == doctest::Approx(1.0 - 1e-9).epsilon(1e-12));

  CHECK_THROWS_AS(quantile(GapSpec{3, 2}, 0.0), std::domain_error);
  CHECK_THROWS_AS(quantile(GapSpec{3, 2}, 1.0), std::domain_error);
  CHECK_THROWS_AS(quantile(GapSpec{3, 2}, 0.5, -1.0), std::domain_error);
  CHECK_THROWS_AS(quantile(GapSpec{3, 0}, 0.5), std::domain_error);
}

TEST_CASE("quantile round trip stays within tolerance on the probability scale") {
  const double tol = 1e-12;
  for (long n : {5L, 10L}) {
    for (long k = 1; k <= n + 1; ++k) {
      for (double p : {0.01, 0.05, 0.5, 0.95}) {
        auto res = quantile(GapSpec{n, k}, p, tol);
        Rational sf = survival_exact({n, k}, Rational::from_double(res.x));
        CHECK(std::fabs(sf.to_double() - p) <= tol);
        CHECK(res.x >= 0.0);
        CHECK(res.x <= Rational(1, n - k + 2).to_double() * (1.0 + 1e-15));
      }
    }
  }
}

TEST_CASE("scalar quantile validates the root exactly for exact p") {
  Scalar x = quantile(GapSpec{2, 3}, Scalar::exact(Rational(3, 4)), 1e-12);
  CHECK_FALSE(x.is_exact());
  CHECK(x.value() == doctest::Approx(0.5).epsilon(1e-11));
}

TEST_CASE("root finder never leaves the bracket it was given") {
  const double lo = 0.0;
  const double hi = 0.25;
  int evals = 0;
  auto f = [&](double x) {
    CHECK(x >= lo);
    CHECK(x <= hi);
    ++evals;
    return survival_float({3, 1}, x).value - 0.37;
  };
  auto res = detail::bracketed_root(f, lo, hi, 1.0 - 0.37, 0.0 - 0.37, 1e-13, 200);
  CHECK(std::fabs(res.f_at_x) <= 1e-13);
  CHECK(evals == res.evaluations);
}

TEST_CASE("asymptotic means pick the right regime") {
  auto lin = mean_asymptotics(10000, 10);
  CHECK(lin.regime == AsymptoticRegime::Linear);
  CHECK(lin.value == doctest::Approx(1e-7).epsilon(1e-12));

  auto log_regime = mean_asymptotics(100, 50);
  CHECK(log_regime.regime == AsymptoticRegime::Log);
  CHECK(log_regime.value == doctest::Approx(std::log(2.0) / 100.0).epsilon(1e-12));

  // diagnostic accuracy at moderate size
  double exact = expected_gap({100, 50}).to_double();
  CHECK(std::fabs(log_regime.value - exact) / exact < 0.05);

  CHECK_THROWS_AS(mean_asymptotics(100, 101), std::domain_error);
  CHECK_THROWS_AS(mean_asymptotics(100, 0), std::domain_error);
}

}  // TEST_SUITE
