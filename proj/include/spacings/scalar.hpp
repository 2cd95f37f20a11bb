// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spacings/rational.hpp"

#include <string>
#include <string_view>

namespace spacings {

enum class ScalarMode { Exact, Floating };

// Dual-mode number used for thresholds and probabilities: either an exact
// rational (the reference path) or a double carrying an accumulated
// absolute-error estimate.
class Scalar {
 public:
  Scalar() = default;  // exact 0

  static Scalar exact(Rational r);
  static Scalar floating(double value, double error_bound = 0.0);

  // With prefer_exact, decimals and fractions become exact rationals (the
  // library default); otherwise the text is read as a double.
  static Scalar parse(std::string_view text, bool prefer_exact = true);

  ScalarMode mode() const { return mode_; }
  bool is_exact() const { return mode_ == ScalarMode::Exact; }

  // Exact mode only; throws std::logic_error otherwise.
  const Rational& rational() const;

  // Exact value in either mode (floating values are dyadic rationals).
  Rational to_rational() const;

  // Double view in either mode.
  double value() const { return mode_ == ScalarMode::Exact ? exact_.to_double() : value_; }

  // Absolute error estimate; exactly 0 in exact mode.
  double error_bound() const { return mode_ == ScalarMode::Exact ? 0.0 : error_bound_; }

  // Clamp a floating probability into [0,1], folding any excursion into the
  // error bound.  Exact values pass through untouched.
  Scalar clamped_to_unit() const;

  std::string str(int digits = 15) const;      // "3/4" or the decimal, by mode
  std::string decimal(int digits = 15) const;  // decimal rendering in either mode

 private:
  ScalarMode mode_ = ScalarMode::Exact;
  Rational exact_;
  double value_ = 0.0;
  double error_bound_ = 0.0;
};

}  // namespace spacings
