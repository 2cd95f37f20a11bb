// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0

#include "spacings/geometry.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace spacings {

void Box::validate() const {
  if (lower.size() != upper.size()) throw std::invalid_argument("box corner dimensions differ");
  if (lower.empty()) throw std::invalid_argument("box must have dimension >= 1");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i])
      throw std::invalid_argument("box edge " + std::to_string(i) + " has lower > upper");
  }
}

void HalfSpace::validate(std::size_t dim) const {
  if (gamma.size() != dim) throw std::invalid_argument("half-space dimension mismatch");
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (gamma[i].sign() <= 0)
      throw std::invalid_argument("gamma[" + std::to_string(i) + "] must be > 0");
  }
}

Rational tail_measure_power(const Rational& y, long alpha, const std::vector<Rational>& gamma,
                            const std::vector<Rational>& x) {
  if (alpha < 0) throw std::domain_error("alpha must be >= 0");
  if (gamma.empty() || gamma.size() != x.size())
    throw std::invalid_argument("gamma and x must be nonempty and the same length");
  const std::size_t n = gamma.size();
  Rational dot(0);
  Rational denom(1);
  for (std::size_t i = 0; i < n; ++i) {
    if (gamma[i].sign() <= 0)
      throw std::invalid_argument("gamma[" + std::to_string(i) + "] must be > 0");
    dot += gamma[i] * x[i];
    denom *= Rational(alpha + static_cast<long>(i) + 1) * gamma[i];
  }
  Rational head = y - dot;
  if (head.sign() <= 0) return Rational(0);
  return head.pow(static_cast<unsigned long>(alpha + static_cast<long>(n))) / denom;
}

Rational box_halfspace_volume(const Box& box, const HalfSpace& hs, int dimension_cap) {
  box.validate();
  const std::size_t n = box.dim();
  hs.validate(n);
  if (dimension_cap < 1 || dimension_cap > 62)
    throw std::invalid_argument("dimension cap must be in [1, 62]");
  if (n > static_cast<std::size_t>(dimension_cap))
    throw std::domain_error("dimension " + std::to_string(n) + " exceeds cap " +
                            std::to_string(dimension_cap));

  std::vector<Rational> edge(n);
  for (std::size_t i = 0; i < n; ++i) {
    edge[i] = box.upper[i] - box.lower[i];
    if (edge[i].is_zero()) return Rational(0);  // degenerate box
  }

  // delta[t]: dot-product change when the binary counter carries into bit t
  // (bits 0..t-1 fall back to the lower corner, bit t moves to the upper).
  std::vector<Rational> delta(n);
  Rational prefix(0);
  for (std::size_t t = 0; t < n; ++t) {
    Rational step = hs.gamma[t] * edge[t];
    delta[t] = step - prefix;
    prefix += step;
  }

  Rational dot(0);
  for (std::size_t i = 0; i < n; ++i) dot += hs.gamma[i] * box.lower[i];

  Rational sum(0);
  int parity = 0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t idx = 0;; ++idx) {
    Rational head = hs.y - dot;
    if (head.sign() > 0) {
      Rational term = head.pow(static_cast<unsigned long>(n));
      if (parity == 0)
        sum += term;
      else
        sum -= term;
    }
    if (idx + 1 == count) break;
    const int t = std::countr_zero(idx + 1);
    dot += delta[static_cast<std::size_t>(t)];
    // popcount changes by 1 - t
    if (t % 2 == 0) parity ^= 1;
  }

  Rational denom(1);
  for (std::size_t i = 1; i <= n; ++i) denom *= Rational(static_cast<long>(i));
  for (std::size_t i = 0; i < n; ++i) denom *= hs.gamma[i];
  return sum / denom;
}

Rational oracle_joint_exceedance(long n, long j, const Rational& x, const Rational& y,
                                 int dimension_cap) {
  if (n < 1) throw std::domain_error("n must be >= 1");
  if (j < 0 || j > n) throw std::domain_error("j = " + std::to_string(j) + " out of [0, n]");
  if (!(x > Rational(0) && x < Rational(1)))
    throw std::domain_error("x = " + x.str() + " outside (0, 1)");
  if (!(y > Rational(0) && y <= Rational(1)))
    throw std::domain_error("y = " + y.str() + " outside (0, 1]");

  Box box;
  box.lower.assign(static_cast<std::size_t>(n), x);
  box.upper.assign(static_cast<std::size_t>(n), Rational(1));
  for (long i = 0; i < j; ++i) {
    box.lower[static_cast<std::size_t>(i)] = Rational(0);
    box.upper[static_cast<std::size_t>(i)] = x;
  }
  HalfSpace hs;
  hs.gamma.assign(static_cast<std::size_t>(n), Rational(1));
  hs.y = y;

  Rational factorial(1);
  for (long i = 2; i <= n; ++i) factorial *= Rational(i);
  return factorial * box_halfspace_volume(box, hs, dimension_cap);
}

Rational oracle_band_probability(long n, long m, const Rational& x, int dimension_cap) {
  if (n < 1) throw std::domain_error("n must be >= 1");
  if (m < 0 || m > n + 1) throw std::domain_error("m = " + std::to_string(m) + " out of [0, n+1]");
  if (!(x > Rational(0) && x < Rational(1)))
    throw std::domain_error("x = " + x.str() + " outside (0, 1)");

  const long k = n + 1 - m;
  Rational total(0);
  if (k >= 0 && k <= n) {
    total += binomial(static_cast<unsigned long>(n), k) *
             oracle_joint_exceedance(n, k, x, Rational(1) - x, dimension_cap);
  }
  if (k - 1 >= 0 && k - 1 <= n) {
    Rational whole = oracle_joint_exceedance(n, k - 1, x, Rational(1), dimension_cap);
    Rational inner = oracle_joint_exceedance(n, k - 1, x, Rational(1) - x, dimension_cap);
    total += binomial(static_cast<unsigned long>(n), k - 1) * (whole - inner);
  }
  return total;
}

Rational oracle_survival(long n, long k, const Rational& x, int dimension_cap) {
  if (n < 1) throw std::domain_error("n must be >= 1");
  if (k < 1 || k > n + 1) throw std::domain_error("k = " + std::to_string(k) + " out of [1, n+1]");
  Rational total(0);
  for (long j = 0; j < k; ++j) total += oracle_band_probability(n, n + 1 - j, x, dimension_cap);
  return total;
}

}  // namespace spacings
