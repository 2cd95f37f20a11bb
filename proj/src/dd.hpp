// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spacings/rational.hpp"

#include <cmath>

namespace spacings::detail {

// Unevaluated double-double sum hi + lo with |lo| <= ulp(hi)/2.  Gives about
// 106 bits of significand, enough that evaluating the alternating binomial
// sums is limited by the condition number times 2^-104 instead of 2^-53.
struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DD quick_two_sum(double a, double b) {  // requires |a| >= |b|
  double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DD dd_add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  DD t = two_sum(a.lo, b.lo);
  double lo = s.lo + t.hi;
  DD r = quick_two_sum(s.hi, lo);
  lo = r.lo + t.lo;
  return quick_two_sum(r.hi, lo);
}

inline DD dd_neg(DD a) { return {-a.hi, -a.lo}; }

inline DD dd_sub(DD a, DD b) { return dd_add(a, dd_neg(b)); }

inline DD dd_mul(DD a, DD b) {
  DD p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline DD dd_pow(DD base, unsigned long e) {
  DD acc{1.0, 0.0};
  DD b = base;
  while (e != 0) {
    if (e & 1UL) acc = dd_mul(acc, b);
    e >>= 1UL;
    if (e != 0) b = dd_mul(b, b);
  }
  return acc;
}

inline double dd_to_double(DD a) { return a.hi + a.lo; }

// Nearest double-double to a rational: hi = double(q), lo = double(q - hi).
// The residual after both is O(2^-104) relative.
inline DD dd_from_rational(const Rational& q) {
  double hi = q.to_double();
  if (!std::isfinite(hi)) return {hi, 0.0};
  double lo = (q - Rational::from_double(hi)).to_double();
  return quick_two_sum(hi, lo);
}

// Exact 1 - c*x when c is a nonnegative integer (fits a double) and x is a
// double: c*x splits exactly through an FMA, the rest through two_sum.
inline DD dd_one_minus_cx(double c, double x) {
  DD p = two_prod(c, x);
  DD s = two_sum(1.0, -p.hi);
  double lo = s.lo - p.lo;
  return quick_two_sum(s.hi, lo);
}

// Same with a general double-double head y: y - c*x.
inline DD dd_y_minus_cx(DD y, double c, double x) {
  DD p = two_prod(c, x);
  return dd_sub(y, p);
}

}  // namespace spacings::detail
