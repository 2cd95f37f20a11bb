// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0

#include "spacings/moments.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace spacings {

Rational HarmonicTable::harmonic(std::size_t j) {
  {
    std::shared_lock lock(mutex_);
    if (j < values_.size()) return values_[j];
  }
  std::unique_lock lock(mutex_);
  while (values_.size() <= j) {
    long next = static_cast<long>(values_.size());
    values_.push_back(values_.back() + Rational(1, next));
  }
  return values_[j];
}

std::size_t HarmonicTable::size() const {
  std::shared_lock lock(mutex_);
  return values_.size();
}

HarmonicTable& HarmonicTable::shared() {
  static HarmonicTable table;
  return table;
}

Rational expected_gap(const GapSpec& spec) {
  spec.validate();
  if (spec.k > spec.n + 1)
    throw std::domain_error("rank k = " + std::to_string(spec.k) + " out of range [0, n+1]");
  if (spec.k == 0) return Rational(0);
  HarmonicTable& table = HarmonicTable::shared();
  Rational diff = table.harmonic(static_cast<std::size_t>(spec.n + 1)) -
                  table.harmonic(static_cast<std::size_t>(spec.n + 1 - spec.k));
  return diff / Rational(spec.n + 1);
}

Breakpoints Breakpoints::survival_support(const GapSpec& spec) {
  spec.validate();
  if (spec.k < 1 || spec.k > spec.n + 1)
    throw std::domain_error("rank k = " + std::to_string(spec.k) + " out of range [1, n+1]");
  Breakpoints bp;
  bp.n = spec.n;
  bp.k = spec.k;
  bp.points.reserve(static_cast<std::size_t>(spec.k));
  for (long r = 0; r < spec.k; ++r) bp.points.emplace_back(1L, spec.n - r + 1);
  return bp;
}

namespace detail {

RootResult bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                          double f_lo, double f_hi, double tol, int budget) {
  RootResult best{lo, f_lo, 0};
  if (std::fabs(f_hi) < std::fabs(f_lo)) best = {hi, f_hi, 0};
  if (std::fabs(best.f_at_x) <= tol) return best;

  double a = lo, b = hi, fa = f_lo, fb = f_hi;
  bool bisect_next = false;
  for (int it = 0; it < budget; ++it) {
    double x;
    if (!bisect_next && fa != fb) {
      x = b - fb * (b - a) / (fb - fa);  // secant through the bracket
      double w = b - a;
      if (!(x > a + 0.01 * w && x < b - 0.01 * w)) x = a + 0.5 * w;
    } else {
      x = a + 0.5 * (b - a);
    }
    bisect_next = !bisect_next;

    double fx = f(x);
    int evals = it + 1;
    if (std::fabs(fx) < std::fabs(best.f_at_x)) best = {x, fx, evals};
    if (std::fabs(fx) <= tol) return {x, fx, evals};
    if (fx > 0.0) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    if (b - a <= std::ldexp(std::fabs(b) + 1.0, -60)) {
      // bracket exhausted in x; accept the best point if it meets tol
      if (std::fabs(best.f_at_x) <= tol) return best;
      break;
    }
  }
  std::ostringstream msg;
  msg << "root refinement did not reach tol = " << tol << "; best bracket [" << a << ", " << b
      << "], residual " << best.f_at_x;
  throw std::runtime_error(msg.str());
}

}  // namespace detail

QuantileResult quantile(const GapSpec& spec, double p, double tol, const EvalPolicy& policy) {
  spec.validate();
  if (spec.k < 1 || spec.k > spec.n + 1)
    throw std::domain_error("rank k = " + std::to_string(spec.k) + " out of range [1, n+1]");
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("p = " + std::to_string(p) + " outside (0, 1)");
  if (!(tol > 0.0)) throw std::domain_error("tolerance must be > 0");

  Breakpoints bp = Breakpoints::survival_support(spec);
  int evals = 0;
  auto sf = [&](double x) {
    ++evals;
    return survival_float(spec, x, policy).value;
  };

  // walk the polynomial segments; survival is decreasing from 1 to 0
  double seg_lo = 0.0;
  double f_lo = 1.0 - p;
  QuantileResult out;
  // converge a little past tol so one exact verification cannot miss it
  const double inner_tol = 0.9 * tol;
  for (std::size_t s = 0; s < bp.points.size(); ++s) {
    double seg_hi = bp.points[s].to_double();
    double f_hi = (s + 1 == bp.points.size()) ? -p : sf(seg_hi) - p;
    if (f_hi <= 0.0) {
      auto root = detail::bracketed_root([&](double x) { return sf(x) - p; }, seg_lo, seg_hi,
                                         f_lo, f_hi, inner_tol, 200);
      out.x = root.x;
      out.survival_at_x = root.f_at_x + p;
      out.evaluations = evals;
      return out;
    }
    seg_lo = seg_hi;
    f_lo = f_hi;
  }
  throw std::logic_error("survival never crossed p; breakpoints inconsistent");
}

Scalar quantile(const GapSpec& spec, const Scalar& p, double tol, const EvalPolicy& policy) {
  QuantileResult res = quantile(spec, p.value(), tol, policy);
  if (p.is_exact()) {
    Rational achieved = survival_exact(spec, Rational::from_double(res.x));
    Rational err = (achieved - p.rational()).abs();
    if (err > Rational::from_double(tol)) {
      throw std::runtime_error("quantile validation failed: |survival - p| = " + err.decimal(20) +
                               " > tol");
    }
  }
  return Scalar::floating(res.x, tol);
}

AsymptoticMean mean_asymptotics(long n, long k) {
  if (n < 1 || k < 1 || k > n)
    throw std::domain_error("asymptotic mean needs 1 <= k <= n (use expected_gap for k = n+1)");
  bool linear = static_cast<double>(k) * static_cast<double>(k) <= static_cast<double>(n);
  return mean_asymptotics(n, k, linear ? AsymptoticRegime::Linear : AsymptoticRegime::Log);
}

AsymptoticMean mean_asymptotics(long n, long k, AsymptoticRegime regime) {
  if (n < 1 || k < 1 || k > n)
    throw std::domain_error("asymptotic mean needs 1 <= k <= n (use expected_gap for k = n+1)");
  AsymptoticMean out;
  out.regime = regime;
  double nd = static_cast<double>(n);
  double kd = static_cast<double>(k);
  if (regime == AsymptoticRegime::Linear) {
    out.value = kd / (nd * nd);
  } else {
    out.value = k == n ? std::numeric_limits<double>::infinity() : std::log(nd / (nd - kd)) / nd;
  }
  return out;
}

}  // namespace spacings
