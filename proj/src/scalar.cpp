// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0

#include "spacings/scalar.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace spacings {

Scalar Scalar::exact(Rational r) {
  Scalar s;
  s.mode_ = ScalarMode::Exact;
  s.exact_ = std::move(r);
  return s;
}

Scalar Scalar::floating(double value, double error_bound) {
  Scalar s;
  s.mode_ = ScalarMode::Floating;
  s.value_ = value;
  s.error_bound_ = error_bound;
  return s;
}

Scalar Scalar::parse(std::string_view text, bool prefer_exact) {
  if (prefer_exact) return exact(Rational::parse(text));
  std::size_t pos = 0;
  std::string owned(text);
  double v = 0.0;
  try {
    v = std::stod(owned, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: \"" + owned + "\"");
  }
  while (pos < owned.size() && std::isspace(static_cast<unsigned char>(owned[pos]))) ++pos;
  if (pos != owned.size()) {
    // allow "a/b" in float mode too
    return floating(Rational::parse(owned).to_double());
  }
  return floating(v);
}

const Rational& Scalar::rational() const {
  if (mode_ != ScalarMode::Exact) throw std::logic_error("Scalar is not in exact mode");
  return exact_;
}

Rational Scalar::to_rational() const {
  return mode_ == ScalarMode::Exact ? exact_ : Rational::from_double(value_);
}

Scalar Scalar::clamped_to_unit() const {
  if (mode_ == ScalarMode::Exact) return *this;
  double v = value_;
  double err = error_bound_;
  if (v < 0.0) {
    err += -v;
    v = 0.0;
  } else if (v > 1.0) {
    err += v - 1.0;
    v = 1.0;
  }
  return floating(v, err);
}

std::string Scalar::str(int digits) const {
  return mode_ == ScalarMode::Exact ? exact_.str() : decimal(digits);
}

std::string Scalar::decimal(int digits) const {
  if (mode_ == ScalarMode::Exact) return exact_.decimal(digits);
  if (digits < 1) digits = 1;
  if (digits > 17) digits = 17;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value_);
  return buf;
}

}  // namespace spacings
