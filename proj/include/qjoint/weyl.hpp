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
#include <string>
#include <vector>

#include "qjoint/core.hpp"
#include "qjoint/group.hpp"

namespace qjoint {

/// Shift and phase representations of a finite abelian group on C^d, d = |G|.
///
/// With reference basis {phi_k}:
///   U_x phi_k = phi_{k+x},   V_y phi_k = <y, k> phi_k,
/// where <y, k> is the character pairing (omega^{yk} for a cyclic group). The
/// Fourier transform has entries F_{hk} = conj(<h, k>) / sqrt(d), which is the
/// tensor product of the cyclic transforms for a product group.
///
/// Only the addition and character tables are stored; Weyl operators are
/// monomial matrices and are materialized on request.
class WeylSystem {
 public:
  explicit WeylSystem(FiniteAbelianGroup group) : group_(std::move(group)) {
    const std::size_t d = group_.order();
    add_.resize(d * d);
    neg_.resize(d);
    character_.resize(d * d);
    std::vector<Complex> roots(group_.exponent());
    for (std::size_t e = 0; e < roots.size(); ++e) {
      roots[e] = root_of_unity(static_cast<long long>(e), group_.exponent());
    }
    for (Element a = 0; a < d; ++a) {
      neg_[a] = group_.negate(a);
      for (Element b = 0; b < d; ++b) {
        add_[a * d + b] = group_.add(a, b);
        character_[a * d + b] = roots[group_.pairing_exponent(a, b)];
      }
    }
    // sqrt(d) is exact for perfect squares, which keeps e.g. the Z2 x Z2 matrix exact.
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    fourier_ = Operator(d, d);
    for (Element h = 0; h < d; ++h) {
      for (Element k = 0; k < d; ++k) fourier_(h, k) = std::conj(character(h, k)) * norm;
    }
  }

  explicit WeylSystem(std::size_t d) : WeylSystem(FiniteAbelianGroup::cyclic(d)) {}

  const FiniteAbelianGroup& group() const { return group_; }
  std::size_t dim() const { return group_.order(); }

  Element add(Element a, Element b) const { return add_[a * dim() + b]; }
  Element negate(Element a) const { return neg_[a]; }
  Element subtract(Element a, Element b) const { return add(a, neg_[b]); }

  /// <x, y>; omega^{xy} for Z_d.
  Complex character(Element x, Element y) const { return character_[x * dim() + y]; }

  Operator shift(Element x) const { return displacement(x, 0); }
  Operator phase(Element y) const { return displacement(0, y); }

  /// U_x V_y.
  Operator displacement(Element x, Element y) const {
    check(x);
    check(y);
    const std::size_t d = dim();
    Operator w = Operator::Zero(d, d);
    for (Element h = 0; h < d; ++h) w(add(h, x), h) = character(y, h);
    return w;
  }

  /// (U_x V_y) a (U_x V_y)^*, in O(d^2).
  Operator conjugate(const Operator& a, Element x, Element y) const {
    const std::size_t d = dim();
    Operator out(d, d);
    for (Element r = 0; r < d; ++r) {
      const Element rs = subtract(r, x);
      const Complex cr = character(y, rs);
      for (Element c = 0; c < d; ++c) {
        const Element cs = subtract(c, x);
        out(r, c) = cr * a(rs, cs) * std::conj(character(y, cs));
      }
    }
    return out;
  }

  /// (U_x V_y)^* a (U_x V_y).
  Operator conjugate_inverse(const Operator& a, Element x, Element y) const {
    const std::size_t d = dim();
    Operator out(d, d);
    for (Element r = 0; r < d; ++r) {
      const Complex cr = std::conj(character(y, r));
      const Element rs = add(r, x);
      for (Element c = 0; c < d; ++c) out(r, c) = cr * a(rs, add(c, x)) * character(y, c);
    }
    return out;
  }

  const Operator& fourier() const { return fourier_; }

  Vector basis_vector(Element j) const {
    check(j);
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dim()));
    v(static_cast<Eigen::Index>(j)) = 1.0;
    return v;
  }

  /// psi_k = F^* phi_k, so <phi_j|psi_k> = <j, k> / sqrt(d).
  Vector fourier_vector(Element k) const {
    check(k);
    return fourier_.adjoint().col(static_cast<Eigen::Index>(k));
  }

  Operator identity() const { return Operator::Identity(dim(), dim()); }

 private:
  void check(Element x) const {
    if (x >= dim()) {
      throw IndexError("group element " + std::to_string(x) + " out of range for order " +
                       std::to_string(dim()));
    }
  }

  FiniteAbelianGroup group_;
  std::vector<Element> add_;
  std::vector<Element> neg_;
  std::vector<Complex> character_;
  Operator fourier_;
};

inline WeylSystem build_weyl_system(const FiniteAbelianGroup& group) { return WeylSystem(group); }

inline Operator weyl_operator(const WeylSystem& ws, Element x, Element y) {
  return ws.displacement(x, y);
}

/// (1/sqrt(p)) * sum_x omega^{a x^2} for an odd prime p.
inline Complex gauss_sum(std::size_t p, long long a) {
  if (p < 3 || !is_prime(p)) {
    throw InvalidParameterError("gauss_sum needs an odd prime, got " + std::to_string(p));
  }
  const long long m = static_cast<long long>(p);
  long long r = a % m;
  if (r < 0) r += m;
  if (r == 0) throw InvalidParameterError("gauss_sum needs a nonzero residue");
  Complex sum = 0.0;
  for (long long x = 0; x < m; ++x) sum += root_of_unity(r * x % m * x % m, p);
  return sum / std::sqrt(static_cast<double>(p));
}

/// Closed form of the Gauss sum: (a|p) times 1 or i according to p mod 4.
inline Complex gauss_sum_closed_form(std::size_t p, long long a) {
  const double sign = legendre_symbol(a, p);
  return p % 4 == 1 ? Complex(sign, 0.0) : Complex(0.0, sign);
}

/// Amplitudes of chi_lambda = alpha phi_0 + beta psi_0.
struct UnsharpnessAmplitudes {
  double alpha = 0.0;
  double beta = 0.0;
};

inline UnsharpnessAmplitudes unsharpness_amplitudes(double lambda, std::size_t d) {
  require_unit_interval(lambda, "lambda");
  const double dd = static_cast<double>(d);
  const double beta = std::sqrt(1.0 - lambda);
  const double alpha = (std::sqrt((dd - 1.0) * lambda + 1.0) - beta) / std::sqrt(dd);
  return {alpha, beta};
}

/// sqrt(lambda A(j) + (1 - lambda) 1/d) = (beta/sqrt(d)) 1 + alpha |phi_j><phi_j|.
inline Operator operator_sqrt_of_smeared_effect(double lambda, Element j, const WeylSystem& ws) {
  const auto [alpha, beta] = unsharpness_amplitudes(lambda, ws.dim());
  Operator root = ws.identity() * (beta / std::sqrt(static_cast<double>(ws.dim())));
  root += alpha * projector(ws.basis_vector(j));
  return root;
}

}  // namespace qjoint
