// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Exact quadrature for functions that are polynomial of known degree on an
// interval: Lagrange interpolation at equally spaced rational nodes,
// integrated termwise in rational arithmetic.  Treats the integrand as a
// black box, so it is an independent check on closed-form antiderivatives.

#include "spacings/exact_dist.hpp"
#include "spacings/moments.hpp"
#include "spacings/rational.hpp"

#include <functional>
#include <vector>

namespace quad {

using spacings::Rational;

// integral over [lo, hi] of the Lagrange basis polynomial through
// nodes[0..deg] that is 1 at nodes[i] and 0 at the others
inline Rational basis_integral(const std::vector<Rational>& nodes, std::size_t i,
                               const Rational& lo, const Rational& hi) {
  // expand prod_{j != i} (x - nodes[j]) into power-basis coefficients
  std::vector<Rational> coeff{Rational(1)};
  Rational denom(1);
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (j == i) continue;
    denom *= nodes[i] - nodes[j];
    std::vector<Rational> next(coeff.size() + 1, Rational(0));
    for (std::size_t t = 0; t < coeff.size(); ++t) {
      next[t + 1] += coeff[t];
      next[t] -= coeff[t] * nodes[j];
    }
    coeff = std::move(next);
  }
  Rational integral(0);
  Rational hi_pow = hi, lo_pow = lo;
  for (std::size_t t = 0; t < coeff.size(); ++t) {
    integral += coeff[t] * (hi_pow - lo_pow) / Rational(static_cast<long>(t) + 1);
    hi_pow *= hi;
    lo_pow *= lo;
  }
  return integral / denom;
}

inline Rational integrate_polynomial(const std::function<Rational(const Rational&)>& f,
                                     const Rational& lo, const Rational& hi, int degree) {
  if (lo == hi) return Rational(0);
  const int nodes_count = degree + 1;
  std::vector<Rational> nodes;
  nodes.reserve(static_cast<std::size_t>(nodes_count));
  Rational width = hi - lo;
  for (int i = 0; i < nodes_count; ++i) {
    // interior nodes only, so endpoint breakpoints never land on a node
    nodes.push_back(lo + width * Rational(2L * i + 1, 2L * nodes_count));
  }
  Rational total(0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    total += f(nodes[i]) * basis_integral(nodes, i, lo, hi);
  }
  return total;
}

// integral of P(G_(k) > x) over [0,1], piecewise over the support
// breakpoints where the survival function changes polynomial piece
inline Rational integrate_survival(const spacings::GapSpec& spec) {
  auto bp = spacings::Breakpoints::survival_support(spec);
  Rational total(0);
  Rational lo(0);
  for (const Rational& hi : bp.points) {
    total += integrate_polynomial(
        [&](const Rational& x) { return spacings::survival_exact(spec, x); }, lo, hi,
        static_cast<int>(spec.n));
    lo = hi;
  }
  // survival is identically 0 past the last breakpoint
  return total;
}

}  // namespace quad
