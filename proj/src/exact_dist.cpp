// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0

#include "spacings/exact_dist.hpp"

#include "dd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace spacings {

namespace {

using detail::DD;

[[noreturn]] void throw_range(const std::string& what, long got, long lo, long hi) {
  throw std::domain_error(what + " = " + std::to_string(got) + " out of range [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

void check_unit_interval(const Rational& x, bool open_left, bool open_right, const char* name) {
  bool ok_left = open_left ? x > Rational(0) : x >= Rational(0);
  bool ok_right = open_right ? x < Rational(1) : x <= Rational(1);
  if (!ok_left || !ok_right) {
    throw std::domain_error(std::string(name) + " = " + x.str() + " outside " +
                            (open_left ? "(" : "[") + "0, 1" + (open_right ? ")" : "]"));
  }
}

void check_unit_interval(double x, bool open_left, bool open_right, const char* name) {
  bool ok = std::isfinite(x) && (open_left ? x > 0.0 : x >= 0.0) &&
            (open_right ? x < 1.0 : x <= 1.0);
  if (!ok) {
    throw std::domain_error(std::string(name) + " = " + std::to_string(x) + " outside " +
                            (open_left ? "(" : "[") + "0, 1" + (open_right ? ")" : "]"));
  }
}

FloatEval constant_eval(double v) { return FloatEval{v, 0.0, 1.0, false}; }

// Shared tail of every floating evaluation: magnitude-ordered compensated
// summation of double-double term values, condition tracking, error bound,
// [0,1] clamp, and the exact fallback when cancellation ate the sum.
FloatEval sum_dd_terms(std::vector<DD>& values, long exponent, const EvalPolicy& policy,
                       const std::function<Rational()>& exact_fallback) {
  FloatEval out;
  if (values.empty()) return constant_eval(0.0);

  std::sort(values.begin(), values.end(),
            [](const DD& a, const DD& b) { return std::fabs(a.hi) > std::fabs(b.hi); });

  DD acc{0.0, 0.0};
  double sum_abs = 0.0;
  for (const DD& v : values) {
    acc = detail::dd_add(acc, v);
    sum_abs += std::fabs(v.hi);
  }
  double value = detail::dd_to_double(acc);

  out.condition = value != 0.0 ? sum_abs / std::fabs(value)
                               : (sum_abs == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());

  if (!std::isfinite(out.condition) || out.condition > policy.condition_threshold ||
      !std::isfinite(value)) {
    if (policy.allow_fallback) {
      double exact = exact_fallback().to_double();
      out.value = exact;
      out.error_bound = std::ldexp(std::fabs(exact), -52);
      out.fell_back = true;
      return out;
    }
  }

  // Residual after double-double evaluation: every term and every partial
  // sum is accurate to O(2^-104) relative, so the bound scales with the
  // magnitude sum, not the result.  Constants are deliberately generous.
  double ops = static_cast<double>(values.size()) +
               2.0 * std::log2(static_cast<double>(exponent) + 2.0) + 8.0;
  out.error_bound = 16.0 * ops * std::ldexp(sum_abs, -104) + std::ldexp(std::fabs(value), -53);

  if (value < 0.0) {
    out.error_bound += -value;
    value = 0.0;
  } else if (value > 1.0) {
    out.error_bound += value - 1.0;
    value = 1.0;
  }
  out.value = value;
  return out;
}

}  // namespace

void GapSpec::validate() const {
  if (n < 1) throw std::domain_error("n = " + std::to_string(n) + " must be >= 1");
  if (k < 0 || k > n + 2) throw_range("rank k", k, 0, n + 2);
}

void BandQuery::validate() const {
  if (n < 1) throw std::domain_error("n = " + std::to_string(n) + " must be >= 1");
  if (m < 0 || m > n + 1) throw_range("count m", m, 0, n + 1);
}

void TailQuery::validate() const {
  if (n < 1) throw std::domain_error("n = " + std::to_string(n) + " must be >= 1");
  if (ell < 1 || ell > n + 1) throw_range("count ell", ell, 1, n + 1);
}

bool TruncatedPowerTerm::active(const Rational& x) const {
  if (slope == 0) return true;
  return x * Rational(slope) < Rational(1);
}

Rational TruncatedPowerTerm::eval(const Rational& x) const {
  if (!active(x)) return Rational(0);
  Rational base = Rational(1) - Rational(slope) * x;
  Rational v = coefficient * base.pow(static_cast<unsigned long>(exponent));
  return sign < 0 ? -v : v;
}

std::vector<TruncatedPowerTerm> survival_terms(const GapSpec& spec) {
  spec.validate();
  if (spec.k < 1 || spec.k > spec.n + 1) throw_range("rank k (formula)", spec.k, 1, spec.n + 1);
  const long n = spec.n;
  const long k = spec.k;
  std::vector<TruncatedPowerTerm> terms;
  terms.reserve(static_cast<std::size_t>(k));
  const mpz_class lead = mpz_class(n + 1) * binomial_mpz(static_cast<unsigned long>(n), k - 1);
  for (long r = 0; r < k; ++r) {
    TruncatedPowerTerm t;
    t.sign = ((k + 1 + r) % 2 == 0) ? 1 : -1;
    t.coefficient =
        Rational(lead * binomial_mpz(static_cast<unsigned long>(k - 1), r), mpz_class(n - r + 1));
    t.slope = n - r + 1;
    t.exponent = n;
    terms.push_back(std::move(t));
  }
  return terms;
}

std::vector<TruncatedPowerTerm> band_terms(long n, long m) {
  BandQuery{n, m, Scalar()}.validate();
  const long k = n + 1 - m;
  std::vector<TruncatedPowerTerm> terms;
  terms.reserve(static_cast<std::size_t>(k) + 1);
  const mpz_class lead = binomial_mpz(static_cast<unsigned long>(n + 1), k);
  for (long r = 0; r <= k; ++r) {
    TruncatedPowerTerm t;
    t.sign = ((k + r) % 2 == 0) ? 1 : -1;
    t.coefficient =
        Rational(lead * binomial_mpz(static_cast<unsigned long>(k), r), mpz_class(1));
    t.slope = n - r + 1;  // reaches 0 at r = k = n+1 (the constant term)
    t.exponent = n;
    terms.push_back(std::move(t));
  }
  return terms;
}

std::vector<TruncatedPowerTerm> max_gap_terms(long n) {
  if (n < 1) throw std::domain_error("n = " + std::to_string(n) + " must be >= 1");
  std::vector<TruncatedPowerTerm> terms;
  terms.reserve(static_cast<std::size_t>(n) + 1);
  for (long s = 1; s <= n + 1; ++s) {
    TruncatedPowerTerm t;
    t.sign = ((s - 1) % 2 == 0) ? 1 : -1;
    t.coefficient = binomial(static_cast<unsigned long>(n + 1), s);
    t.slope = s;
    t.exponent = n;
    terms.push_back(std::move(t));
  }
  return terms;
}

Rational eval_terms_exact(const std::vector<TruncatedPowerTerm>& terms, const Rational& x) {
  Rational sum(0);
  for (const TruncatedPowerTerm& t : terms) {
    if (!t.active(x)) continue;  // never evaluate truncated-away terms
    sum += t.eval(x);
  }
  return sum;
}

FloatEval eval_terms_float(const std::vector<TruncatedPowerTerm>& terms, double x,
                           const EvalPolicy& policy) {
  check_unit_interval(x, false, false, "x");
  std::vector<DD> values;
  values.reserve(terms.size());
  long exponent = 1;
  for (const TruncatedPowerTerm& t : terms) {
    DD base = t.slope == 0 ? DD{1.0, 0.0}
                           : detail::dd_one_minus_cx(static_cast<double>(t.slope), x);
    if (base.hi < 0.0 || (base.hi == 0.0 && base.lo <= 0.0)) continue;
    exponent = std::max(exponent, t.exponent);
    DD v = detail::dd_mul(detail::dd_from_rational(t.coefficient),
                          detail::dd_pow(base, static_cast<unsigned long>(t.exponent)));
    if (t.sign < 0) v = detail::dd_neg(v);
    values.push_back(v);
  }
  return sum_dd_terms(values, exponent, policy,
                      [&] { return eval_terms_exact(terms, Rational::from_double(x)); });
}

Rational survival_exact(const GapSpec& spec, const Rational& x) {
  spec.validate();
  check_unit_interval(x, false, false, "x");
  if (spec.k == 0) return Rational(0);
  if (spec.k == spec.n + 2) return x < Rational(1) ? Rational(1) : Rational(0);
  return eval_terms_exact(survival_terms(spec), x);
}

Rational cdf_exact(const GapSpec& spec, const Rational& x) {
  return Rational(1) - survival_exact(spec, x);
}

Rational band_probability_exact(long n, long m, const Rational& x) {
  BandQuery{n, m, Scalar()}.validate();
  check_unit_interval(x, false, false, "x");
  // closed endpoints by continuity: every spacing is a.s. in (0,1)
  if (x.is_zero()) return Rational(m == n + 1 ? 1 : 0);
  if (x == Rational(1)) return Rational(m == 0 ? 1 : 0);
  return eval_terms_exact(band_terms(n, m), x);
}

Rational max_gap_survival_exact(long n, const Rational& x) {
  check_unit_interval(x, false, false, "x");
  return eval_terms_exact(max_gap_terms(n), x);
}

Rational tail_pvalue_exact(long n, long ell, const Rational& x) {
  TailQuery{n, ell, Scalar()}.validate();
  return survival_exact(GapSpec{n, n + 2 - ell}, x);
}

Rational joint_exceedance_exact(long n, long j, const Rational& x, const Rational& y) {
  if (n < 1) throw std::domain_error("n = " + std::to_string(n) + " must be >= 1");
  if (j < 0 || j > n) throw_range("index j", j, 0, n);
  check_unit_interval(x, true, true, "x");
  if (!(y > Rational(0) && y <= Rational(1)))
    throw std::domain_error("y = " + y.str() + " outside (0, 1]");
  Rational sum(0);
  for (long r = 0; r <= j; ++r) {
    Rational base = y - Rational(n - r) * x;
    if (base.sign() <= 0) continue;
    Rational v = binomial(static_cast<unsigned long>(j), r) *
                 base.pow(static_cast<unsigned long>(n));
    sum += ((j - r) % 2 == 0) ? v : -v;
  }
  return sum;
}

FloatEval survival_float(const GapSpec& spec, double x, const EvalPolicy& policy) {
  spec.validate();
  check_unit_interval(x, false, false, "x");
  if (spec.k == 0) return constant_eval(0.0);
  if (spec.k == spec.n + 2) return constant_eval(x < 1.0 ? 1.0 : 0.0);
  return eval_terms_float(survival_terms(spec), x, policy);
}

FloatEval cdf_float(const GapSpec& spec, double x, const EvalPolicy& policy) {
  FloatEval sf = survival_float(spec, x, policy);
  FloatEval out = sf;
  out.value = 1.0 - sf.value;
  out.error_bound = sf.error_bound + std::ldexp(1.0, -53);
  return out;
}

FloatEval band_probability_float(long n, long m, double x, const EvalPolicy& policy) {
  BandQuery{n, m, Scalar()}.validate();
  check_unit_interval(x, false, false, "x");
  if (x == 0.0) return constant_eval(m == n + 1 ? 1.0 : 0.0);
  if (x == 1.0) return constant_eval(m == 0 ? 1.0 : 0.0);
  return eval_terms_float(band_terms(n, m), x, policy);
}

FloatEval max_gap_survival_float(long n, double x, const EvalPolicy& policy) {
  return eval_terms_float(max_gap_terms(n), x, policy);
}

FloatEval tail_pvalue_float(long n, long ell, double x, const EvalPolicy& policy) {
  TailQuery{n, ell, Scalar()}.validate();
  return survival_float(GapSpec{n, n + 2 - ell}, x, policy);
}

FloatEval joint_exceedance_float(long n, long j, double x, double y, const EvalPolicy& policy) {
  if (n < 1) throw std::domain_error("n = " + std::to_string(n) + " must be >= 1");
  if (j < 0 || j > n) throw_range("index j", j, 0, n);
  check_unit_interval(x, true, true, "x");
  if (!std::isfinite(y) || !(y > 0.0 && y <= 1.0))
    throw std::domain_error("y = " + std::to_string(y) + " outside (0, 1]");

  std::vector<DD> values;
  values.reserve(static_cast<std::size_t>(j) + 1);
  for (long r = 0; r <= j; ++r) {
    DD base = detail::dd_y_minus_cx(DD{y, 0.0}, static_cast<double>(n - r), x);
    if (base.hi < 0.0 || (base.hi == 0.0 && base.lo <= 0.0)) continue;
    DD v = detail::dd_mul(detail::dd_from_rational(binomial(static_cast<unsigned long>(j), r)),
                          detail::dd_pow(base, static_cast<unsigned long>(n)));
    if ((j - r) % 2 != 0) v = detail::dd_neg(v);
    values.push_back(v);
  }
  return sum_dd_terms(values, n, policy, [&] {
    return joint_exceedance_exact(n, j, Rational::from_double(x), Rational::from_double(y));
  });
}

namespace {

Scalar dispatch(const Scalar& x, FloatEval* diag, const std::function<Rational(const Rational&)>& ex,
                const std::function<FloatEval(double)>& fl) {
  if (x.is_exact()) return Scalar::exact(ex(x.rational()));
  FloatEval fe = fl(x.value());
  if (diag != nullptr) *diag = fe;
  return Scalar::floating(fe.value, fe.error_bound);
}

}  // namespace

Scalar survival(const GapSpec& spec, const Scalar& x, const EvalPolicy& policy, FloatEval* diag) {
  return dispatch(
      x, diag, [&](const Rational& r) { return survival_exact(spec, r); },
      [&](double d) { return survival_float(spec, d, policy); });
}

Scalar cdf(const GapSpec& spec, const Scalar& x, const EvalPolicy& policy, FloatEval* diag) {
  return dispatch(
      x, diag, [&](const Rational& r) { return cdf_exact(spec, r); },
      [&](double d) { return cdf_float(spec, d, policy); });
}

Scalar band_probability(const BandQuery& q, const EvalPolicy& policy, FloatEval* diag) {
  return dispatch(
      q.x, diag, [&](const Rational& r) { return band_probability_exact(q.n, q.m, r); },
      [&](double d) { return band_probability_float(q.n, q.m, d, policy); });
}

Scalar max_gap_survival(long n, const Scalar& x, const EvalPolicy& policy, FloatEval* diag) {
  return dispatch(
      x, diag, [&](const Rational& r) { return max_gap_survival_exact(n, r); },
      [&](double d) { return max_gap_survival_float(n, d, policy); });
}

Scalar joint_exceedance(long n, long j, const Scalar& x, const Scalar& y,
                        const EvalPolicy& policy, FloatEval* diag) {
  if (x.is_exact() && y.is_exact())
    return Scalar::exact(joint_exceedance_exact(n, j, x.rational(), y.rational()));
  FloatEval fe = joint_exceedance_float(n, j, x.value(), y.value(), policy);
  if (diag != nullptr) *diag = fe;
  return Scalar::floating(fe.value, fe.error_bound);
}

Scalar tail_pvalue(const TailQuery& q, const EvalPolicy& policy, FloatEval* diag) {
  return dispatch(
      q.x, diag, [&](const Rational& r) { return tail_pvalue_exact(q.n, q.ell, r); },
      [&](double d) { return tail_pvalue_float(q.n, q.ell, d, policy); });
}

}  // namespace spacings
