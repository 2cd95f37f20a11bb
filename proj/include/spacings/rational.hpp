// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <string>
#include <string_view>

namespace spacings {

// Arbitrary-precision rational, always in canonical form: reduced to lowest
// terms with a positive denominator.  Thin value wrapper over GMP's
// mpq_class so parsing, rendering and conversions live in one place.
class Rational {
 public:
  Rational() : q_(0) {}
  Rational(long v) : q_(static_cast<signed long>(v)) {}  // NOLINT: implicit by design
  Rational(long num, long den);
  Rational(const mpz_class& num, const mpz_class& den);
  explicit Rational(const mpq_class& q);

  // Exact value of a finite IEEE double (every finite double is rational).
  static Rational from_double(double v);

  // Accepts "num/den", integers, and decimals with an optional exponent
  // ("1/3", "-2", "0.05", "2.5e-3").  Decimals parse exactly, never via
  // binary floating point.  Throws std::invalid_argument on malformed text.
  static Rational parse(std::string_view text);

  const mpz_class& num() const { return q_.get_num(); }
  const mpz_class& den() const { return q_.get_den(); }

  int sign() const { return sgn(q_); }
  bool is_zero() const { return sgn(q_) == 0; }
  bool is_integer() const { return q_.get_den() == 1; }

  double to_double() const { return q_.get_d(); }

  Rational pow(unsigned long e) const;
  Rational abs() const { return sgn(q_) < 0 ? Rational(raw_tag{}, mpq_class(-q_)) : *this; }
  Rational reciprocal() const;

  // "num/den", or just "num" when the denominator is 1.
  std::string str() const;

  // Fixed-point decimal with at most `digits` places after the point,
  // rounded half-to-even, trailing zeros trimmed ("3/4" -> "0.75").
  std::string decimal(int digits = 15) const;

  const mpq_class& raw() const { return q_; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(raw_tag{}, mpq_class(a.q_ + b.q_));
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(raw_tag{}, mpq_class(a.q_ - b.q_));
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(raw_tag{}, mpq_class(a.q_ * b.q_));
  }
  friend Rational operator/(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a) { return Rational(raw_tag{}, mpq_class(-a.q_)); }

  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o);

  friend bool operator==(const Rational& a, const Rational& b) { return mpq_equal(a.q_.get_mpq_t(), b.q_.get_mpq_t()) != 0; }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) < 0; }
  friend bool operator<=(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) <= 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) > 0; }
  friend bool operator>=(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) >= 0; }

 private:
  struct raw_tag {};
  // mpq arithmetic preserves canonical form, so results skip canonicalize().
  Rational(raw_tag, mpq_class q) : q_(std::move(q)) {}

  mpq_class q_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

// Binomial coefficient with the combinatorial convention: 0 whenever r < 0
// or r > n.
mpz_class binomial_mpz(unsigned long n, long r);
Rational binomial(unsigned long n, long r);

}  // namespace spacings
