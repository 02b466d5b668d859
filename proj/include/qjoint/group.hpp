// Copyright 2026 The qjoint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qjoint/core.hpp"

namespace qjoint {

/// exp(2*pi*i*k/n). The exponent is reduced mod n first; quarter turns are exact.
inline Complex root_of_unity(long long k, std::size_t n) {
  const long long m = static_cast<long long>(n);
  long long r = k % m;
  if (r < 0) r += m;
  if ((4 * r) % m == 0) {
    switch ((4 * r) / m) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

inline bool is_prime(std::size_t n) {
  if (n < 2) return false;
  for (std::size_t f = 2; f * f <= n; ++f) {
    if (n % f == 0) return false;
  }
  return true;
}

/// Legendre symbol (a|p) for an odd prime p, via Euler's criterion.
inline int legendre_symbol(long long a, std::size_t p) {
  const long long m = static_cast<long long>(p);
  long long base = a % m;
  if (base < 0) base += m;
  if (base == 0) return 0;
  long long result = 1;
  long long e = (m - 1) / 2;
  while (e > 0) {
    if (e & 1) result = result * base % m;
    base = base * base % m;
    e >>= 1;
  }
  return result == 1 ? 1 : -1;
}

/// G = Z_{d1} x ... x Z_{dn}.
class FiniteAbelianGroup {
 public:
  explicit FiniteAbelianGroup(std::vector<std::size_t> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw InvalidGroupError("group needs at least one cyclic factor");
    order_ = 1;
    exponent_ = 1;
    for (std::size_t f : factors_) {
      if (f < 2) {
        throw InvalidGroupError("cyclic factor orders must be >= 2, got " + std::to_string(f));
      }
      order_ *= f;
      exponent_ = std::lcm(exponent_, f);
    }
  }

  static FiniteAbelianGroup cyclic(std::size_t d) { return FiniteAbelianGroup({d}); }

  std::size_t order() const { return order_; }
  std::size_t exponent() const { return exponent_; }
  std::size_t rank() const { return factors_.size(); }
  std::span<const std::size_t> factors() const { return factors_; }
  bool is_cyclic() const { return factors_.size() == 1; }

  bool contains(Element x) const { return x < order_; }

  std::vector<std::size_t> decode(Element x) const {
    check(x);
    std::vector<std::size_t> residues(factors_.size());
    for (std::size_t i = factors_.size(); i-- > 0;) {
      residues[i] = x % factors_[i];
      x /= factors_[i];
    }
    return residues;
  }

  Element encode(std::span<const std::size_t> residues) const {
    if (residues.size() != factors_.size()) {
      throw IndexError("element has " + std::to_string(residues.size()) +
                       " components, group has " + std::to_string(factors_.size()));
    }
    Element x = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (residues[i] >= factors_[i]) throw IndexError("residue out of range for its factor");
      x = x * factors_[i] + residues[i];
    }
    return x;
  }

  Element add(Element a, Element b) const {
    auto ra = decode(a);
    auto rb = decode(b);
    for (std::size_t i = 0; i < ra.size(); ++i) ra[i] = (ra[i] + rb[i]) % factors_[i];
    return encode(ra);
  }

  Element negate(Element a) const {
    auto ra = decode(a);
    for (std::size_t i = 0; i < ra.size(); ++i) ra[i] = (factors_[i] - ra[i]) % factors_[i];
    return encode(ra);
  }

  Element subtract(Element a, Element b) const { return add(a, negate(b)); }

  /// Integer e with <x, y> = exp(2*pi*i*e / exponent()); sum of x_i y_i / d_i over factors.
  std::size_t pairing_exponent(Element x, Element y) const {
    const auto rx = decode(x);
    const auto ry = decode(y);
    std::size_t e = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      const std::size_t scale = exponent_ / factors_[i];
      e = (e + (rx[i] * ry[i] % factors_[i]) * scale) % exponent_;
    }
    return e;
  }

  bool operator==(const FiniteAbelianGroup& other) const { return factors_ == other.factors_; }

 private:
  void check(Element x) const {
    if (x >= order_) {
      throw IndexError("group element " + std::to_string(x) + " out of range for order " +
                       std::to_string(order_));
    }
  }

  std::vector<std::size_t> factors_;
  std::size_t order_ = 1;
  std::size_t exponent_ = 1;
};

}  // namespace qjoint
