// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spacings/exact_dist.hpp"
#include "spacings/rational.hpp"
#include "spacings/scalar.hpp"

#include <deque>
#include <functional>
#include <shared_mutex>

namespace spacings {

// Memoized exact harmonic numbers H_j = 1 + 1/2 + ... + 1/j, H_0 = 0.
// Extends on demand; safe for concurrent readers and extenders.
class HarmonicTable {
 public:
  Rational harmonic(std::size_t j);
  std::size_t size() const;
  static HarmonicTable& shared();

 private:
  mutable std::shared_mutex mutex_;
  std::deque<Rational> values_{Rational(0)};
};

// E G_(k) = (H_{n+1} - H_{n+1-k}) / (n+1), exact.  k = 0 gives the sentinel 0.
Rational expected_gap(const GapSpec& spec);

// Thresholds 1/(n-r+1), r = 0..k-1, in ascending order.  The survival
// function of G_(k) is a polynomial of degree <= n between consecutive
// points and identically 0 past the last one, 1/(n-k+2).
struct Breakpoints {
  long n = 1;
  long k = 1;
  std::vector<Rational> points;
  static Breakpoints survival_support(const GapSpec& spec);  // 1 <= k <= n+1
  const Rational& support_end() const { return points.back(); }
};

struct QuantileResult {
  double x = 0.0;            // upper-tail critical value
  double survival_at_x = 0.0;
  int evaluations = 0;
};

// Solve P(G_(k) > x) = p for x.  The tolerance is on the probability scale:
// |survival(x) - p| <= tol.  Bracketed bisection with secant refinement,
// segment by segment over the breakpoints; never evaluates outside
// [0, 1/(n-k+2)].  Throws std::runtime_error (with the final bracket) if the
// iteration budget runs out.
QuantileResult quantile(const GapSpec& spec, double p, double tol = 1e-12,
                        const EvalPolicy& policy = {});

// Scalar front end; an exact p additionally validates the returned x with
// one exact rational evaluation.
Scalar quantile(const GapSpec& spec, const Scalar& p, double tol = 1e-12,
                const EvalPolicy& policy = {});

enum class AsymptoticRegime { Linear, Log };

struct AsymptoticMean {
  double value = 0.0;
  AsymptoticRegime regime = AsymptoticRegime::Linear;
};

// Large-n approximations of E G_(k), diagnostics only:
//   Linear: k/n^2         (small-rank regime, picked when k^2 <= n)
//   Log:    ln(n/(n-k))/n  (otherwise; +inf at k = n)
// k = n+1 is rejected: use expected_gap, which is exact everywhere.
AsymptoticMean mean_asymptotics(long n, long k);
AsymptoticMean mean_asymptotics(long n, long k, AsymptoticRegime regime);

namespace detail {

struct RootResult {
  double x = 0.0;
  double f_at_x = 0.0;
  int evaluations = 0;
};

// Find f(x) ~ 0 on [lo, hi] given f(lo) >= 0 >= f(hi) and f decreasing.
// Secant steps safeguarded by bisection; every evaluation stays in [lo, hi].
// Throws std::runtime_error after `budget` evaluations without |f| <= tol.
RootResult bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                          double f_lo, double f_hi, double tol, int budget);

}  // namespace detail

}  // namespace spacings
