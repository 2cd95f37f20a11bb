// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0

#include "spacings/rational.hpp"

#include <cctype>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace spacings {

namespace {

[[noreturn]] void throw_parse_error(std::string_view text) {
  throw std::invalid_argument("not a rational: \"" + std::string(text) + "\"");
}

mpz_class pow10(unsigned long e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, e);
  return p;
}

}  // namespace

Rational::Rational(long num, long den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

Rational::Rational(const mpq_class& q) : q_(q) {
  if (q_.get_den() == 0) throw std::domain_error("rational with zero denominator");
  q_.canonicalize();
}

Rational Rational::from_double(double v) {
  if (!std::isfinite(v)) throw std::domain_error("non-finite double has no rational value");
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), v);  // exact
  q.canonicalize();
  return Rational(raw_tag{}, std::move(q));
}

Rational Rational::parse(std::string_view text) {
  // strip surrounding whitespace
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw_parse_error(text);

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view ns = text.substr(0, slash);
    std::string_view ds = text.substr(slash + 1);
    if (ns.empty() || ds.empty() || ds.find('/') != std::string_view::npos) throw_parse_error(text);
    try {
      mpz_class num(std::string(ns), 10);
      mpz_class den(std::string(ds), 10);
      if (den == 0) throw_parse_error(text);
      return Rational(num, den);
    } catch (const std::invalid_argument&) {
      throw_parse_error(text);
    }
  }

  // [sign] digits [. digits] [ (e|E) [sign] digits ]
  std::size_t i = 0;
  bool neg = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    neg = text[i] == '-';
    ++i;
  }
  std::string mantissa;
  unsigned long frac_digits = 0;
  bool saw_digit = false, saw_dot = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa += c;
      saw_digit = true;
      if (saw_dot) ++frac_digits;
    } else if (c == '.' && !saw_dot) {
      saw_dot = true;
    } else if ((c == 'e' || c == 'E') && saw_digit) {
      break;
    } else {
      throw_parse_error(text);
    }
  }
  if (!saw_digit) throw_parse_error(text);

  long exp10 = 0;
  if (i < text.size()) {  // exponent part, text[i] is 'e' or 'E'
    ++i;
    bool eneg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      eneg = text[i] == '-';
      ++i;
    }
    if (i == text.size()) throw_parse_error(text);
    long e = 0;
    for (; i < text.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) throw_parse_error(text);
      e = e * 10 + (text[i] - '0');
      if (e > 1000000) throw_parse_error(text);  // refuse absurd exponents
    }
    exp10 = eneg ? -e : e;
  }

  mpz_class num(mantissa.empty() ? "0" : mantissa, 10);
  if (neg) num = -num;
  mpz_class den = 1;
  long net = exp10 - static_cast<long>(frac_digits);
  if (net >= 0) {
    num *= pow10(static_cast<unsigned long>(net));
  } else {
    den = pow10(static_cast<unsigned long>(-net));
  }
  return Rational(num, den);
}

Rational Rational::pow(unsigned long e) const {
  mpq_class out;
  mpz_pow_ui(out.get_num_mpz_t(), q_.get_num_mpz_t(), e);
  mpz_pow_ui(out.get_den_mpz_t(), q_.get_den_mpz_t(), e);
  // powers of a canonical fraction stay canonical
  return Rational(raw_tag{}, std::move(out));
}

Rational Rational::reciprocal() const {
  if (is_zero()) throw std::domain_error("reciprocal of zero");
  mpq_class out;
  mpq_inv(out.get_mpq_t(), q_.get_mpq_t());
  return Rational(raw_tag{}, std::move(out));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) throw std::domain_error("rational division by zero");
  return Rational(Rational::raw_tag{}, mpq_class(a.q_ / b.q_));
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("rational division by zero");
  q_ /= o.q_;
  return *this;
}

std::string Rational::str() const {
  if (q_.get_den() == 1) return q_.get_num().get_str();
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

std::string Rational::decimal(int digits) const {
  if (digits < 0) digits = 0;
  if (digits > 100000) digits = 100000;

  const bool neg = sign() < 0;
  mpz_class a = ::abs(q_.get_num());
  const mpz_class& d = q_.get_den();

  mpz_class scale = pow10(static_cast<unsigned long>(digits));
  mpz_class scaled_num = a * scale;
  mpz_class q = scaled_num / d;
  mpz_class r = scaled_num % d;

  // round half to even on the last kept digit
  mpz_class twice = 2 * r;
  int c = cmp(twice, d);
  if (c > 0 || (c == 0 && mpz_odd_p(q.get_mpz_t()))) q += 1;

  mpz_class ip = q / scale;
  mpz_class fp = q % scale;

  std::string frac = fp.get_str();
  if (static_cast<int>(frac.size()) < digits) frac.insert(0, digits - frac.size(), '0');
  while (!frac.empty() && frac.back() == '0') frac.pop_back();

  std::string out = ip.get_str();
  if (!frac.empty()) out += "." + frac;
  if (neg && (ip != 0 || !frac.empty())) out.insert(0, 1, '-');
  return out;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

mpz_class binomial_mpz(unsigned long n, long r) {
  if (r < 0 || static_cast<unsigned long>(r) > n) return mpz_class(0);
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), n, static_cast<unsigned long>(r));
  return out;
}

Rational binomial(unsigned long n, long r) { return Rational(binomial_mpz(n, r), mpz_class(1)); }

}  // namespace spacings
