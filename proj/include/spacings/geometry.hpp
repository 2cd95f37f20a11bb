// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spacings/rational.hpp"

#include <vector>

namespace spacings {

// From-first-principles reference for small n, computing the spacing
// probabilities as exact volumes of boxes cut by a half-space.  Shares no
// code (and no formula) with the closed forms in exact_dist, which is the
// whole point: the two routes must agree rationally.

struct Box {
  std::vector<Rational> lower;
  std::vector<Rational> upper;
  std::size_t dim() const { return lower.size(); }
  void validate() const;  // matching sizes, lower_i <= upper_i
};

// { z : gamma . z <= y } with every gamma_i > 0.
struct HalfSpace {
  std::vector<Rational> gamma;
  Rational y;
  void validate(std::size_t dim) const;
};

// Vertex enumeration is 2^n; refuse anything bigger than this by default.
inline constexpr int kDefaultDimensionCap = 20;

// Joint tail measure of the density (y - gamma.z)_+^alpha at the orthant
// vertex x:
//
//   T(x) = (y - gamma.x)_+^(alpha+n) / prod_i ((alpha+i) gamma_i)
Rational tail_measure_power(const Rational& y, long alpha, const std::vector<Rational>& gamma,
                            const std::vector<Rational>& x);

// vol_n(box ∩ half-space) by the 2^n inclusion-exclusion over box vertices:
//
//   vol = 1/(n! prod gamma_i) * sum_eps (-1)^|eps| (y - gamma.(a + eps h))_+^n
//
// Vertices are walked in binary-counter order with incremental dot-product
// updates, so the whole enumeration costs O(2^n) rational additions.
Rational box_halfspace_volume(const Box& box, const HalfSpace& hs,
                              int dimension_cap = kDefaultDimensionCap);

// p_{n,j}(x,y) as n! times the volume of
//   prod_{i<=j} (0,x] x prod_{i>j} (x,1]  ∩  { z_1+...+z_n <= y }.
Rational oracle_joint_exceedance(long n, long j, const Rational& x, const Rational& y,
                                 int dimension_cap = kDefaultDimensionCap);

// P(exactly m of the n+1 spacings exceed x), assembled purely from
// oracle_joint_exceedance via exchangeability:
//   with k = n+1-m:
//   C(n,k) p_{n,k}(x,1-x) + C(n,k-1) (p_{n,k-1}(x,1) - p_{n,k-1}(x,1-x))
Rational oracle_band_probability(long n, long m, const Rational& x,
                                 int dimension_cap = kDefaultDimensionCap);

// P(G_(k) > x) as the sum of the oracle band probabilities over the ranks
// below k.
Rational oracle_survival(long n, long k, const Rational& x,
                         int dimension_cap = kDefaultDimensionCap);

}  // namespace spacings
