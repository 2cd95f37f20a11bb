// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spacings/rational.hpp"
#include "spacings/scalar.hpp"

#include <vector>

namespace spacings {

// Cut [0,1] with n i.i.d. uniform points and order the n+1 spacings:
//
//   0 = G_(0) <= G_(1) <= ... <= G_(n+1) <= G_(n+2) = 1,
//
// where ranks 0 and n+2 are constant sentinels.  GapSpec names the rank-k
// spacing of that chain.
struct GapSpec {
  long n = 1;  // number of uniform points, >= 1
  long k = 1;  // rank, 0 <= k <= n+2
  void validate() const;
};

// "exactly m of the n+1 spacings strictly exceed x"
struct BandQuery {
  long n = 1;
  long m = 0;  // 0 <= m <= n+1
  Scalar x;
  void validate() const;
};

// "at least ell of the n+1 spacings strictly exceed x"
struct TailQuery {
  long n = 1;
  long ell = 1;  // 1 <= ell <= n+1
  Scalar x;
  void validate() const;
};

// One summand  sign * coefficient * (1 - slope*x)_+^exponent  of the
// closed-form distributions.  slope == 0 marks the constant term; for
// slope >= 1 the term vanishes identically on x >= 1/slope and is skipped
// there rather than evaluated.  (u)_+^0 follows the 0^0 := 0 convention.
struct TruncatedPowerTerm {
  int sign = 1;            // +1 or -1
  Rational coefficient;    // >= 0
  long slope = 1;          // integer c in the base 1 - c*x
  long exponent = 1;
  bool active(const Rational& x) const;
  Rational eval(const Rational& x) const;  // 0 when inactive
};

// Term lists of the three closed forms.
//
//   P(G_(k) > x)            = sum_{r=0}^{k-1} (-1)^(k+1+r) (n+1) C(n,k-1) C(k-1,r) / (n-r+1) * (1-(n-r+1)x)_+^n
//   P(exactly m exceed x)   = sum_{r=0}^{k}   (-1)^(k+r)   C(n+1,k) C(k,r)                  * (1-(n-r+1)x)_+^n,  k = n+1-m
//   P(G_(n+1) > x)          = sum_{s=1}^{n+1} (-1)^(s-1)   C(n+1,s)                         * (1-s x)_+^n
std::vector<TruncatedPowerTerm> survival_terms(const GapSpec& spec);  // needs 1 <= k <= n+1
std::vector<TruncatedPowerTerm> band_terms(long n, long m);
std::vector<TruncatedPowerTerm> max_gap_terms(long n);

struct EvalPolicy {
  // (sum of |term|) / |result| above which the double path hands the query
  // to exact rational arithmetic instead of returning a cancelled-away sum.
  double condition_threshold = 1e12;
  bool allow_fallback = true;
};

struct FloatEval {
  double value = 0.0;
  double error_bound = 0.0;  // absolute; includes any [0,1]-clamp excursion
  double condition = 1.0;    // (sum |terms|) / |result|
  bool fell_back = false;    // true when the exact path produced the value
};

Rational eval_terms_exact(const std::vector<TruncatedPowerTerm>& terms, const Rational& x);
FloatEval eval_terms_float(const std::vector<TruncatedPowerTerm>& terms, double x,
                           const EvalPolicy& policy = {});

// Exact rational evaluation (the reference path).  Ranks 0 and n+2 return
// the sentinel constants instead of touching the formula.
Rational survival_exact(const GapSpec& spec, const Rational& x);
Rational cdf_exact(const GapSpec& spec, const Rational& x);
Rational band_probability_exact(long n, long m, const Rational& x);
Rational max_gap_survival_exact(long n, const Rational& x);
Rational tail_pvalue_exact(long n, long ell, const Rational& x);

// p_{n,j}(x,y): the first j of the unordered spacings G_1..G_n are <= x,
// the other n-j exceed x, and G_1+...+G_n < y:
//
//   p_{n,j}(x,y) = sum_{r=0}^{j} (-1)^(j-r) C(j,r) (y-(n-r)x)_+^n
Rational joint_exceedance_exact(long n, long j, const Rational& x, const Rational& y);

// Floating path: double-double term evaluation, magnitude-ordered
// compensated summation, condition tracking, transparent exact fallback.
FloatEval survival_float(const GapSpec& spec, double x, const EvalPolicy& policy = {});
FloatEval cdf_float(const GapSpec& spec, double x, const EvalPolicy& policy = {});
FloatEval band_probability_float(long n, long m, double x, const EvalPolicy& policy = {});
FloatEval max_gap_survival_float(long n, double x, const EvalPolicy& policy = {});
FloatEval tail_pvalue_float(long n, long ell, double x, const EvalPolicy& policy = {});
FloatEval joint_exceedance_float(long n, long j, double x, double y, const EvalPolicy& policy = {});

// Mode-dispatching front ends: an exact threshold yields an exact result,
// a floating threshold the floating path.  `diag`, when given, receives the
// floating diagnostics (untouched for exact inputs).
Scalar survival(const GapSpec& spec, const Scalar& x, const EvalPolicy& policy = {},
                FloatEval* diag = nullptr);
Scalar cdf(const GapSpec& spec, const Scalar& x, const EvalPolicy& policy = {},
           FloatEval* diag = nullptr);
Scalar band_probability(const BandQuery& q, const EvalPolicy& policy = {},
                        FloatEval* diag = nullptr);
Scalar max_gap_survival(long n, const Scalar& x, const EvalPolicy& policy = {},
                        FloatEval* diag = nullptr);
Scalar joint_exceedance(long n, long j, const Scalar& x, const Scalar& y,
                        const EvalPolicy& policy = {}, FloatEval* diag = nullptr);
Scalar tail_pvalue(const TailQuery& q, const EvalPolicy& policy = {}, FloatEval* diag = nullptr);

}  // namespace spacings
