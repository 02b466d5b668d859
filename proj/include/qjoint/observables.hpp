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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qjoint/core.hpp"
#include "qjoint/group.hpp"
#include "qjoint/weyl.hpp"

namespace qjoint {

/// Probability distribution on a finite abelian group. Not validated on
/// construction; call validate().
class ProbDist {
 public:
  ProbDist(FiniteAbelianGroup group, std::vector<double> weights)
      : group_(std::move(group)), weights_(std::move(weights)) {
    if (weights_.size() != group_.order()) {
      throw ShapeError("distribution has " + std::to_string(weights_.size()) +
                       " weights for a group of order " + std::to_string(group_.order()));
    }
  }

  /// delta: all mass at the identity.
  static ProbDist point(const FiniteAbelianGroup& group) {
    std::vector<double> w(group.order(), 0.0);
    w[0] = 1.0;
    return ProbDist(group, std::move(w));
  }

  /// mu: 1/d everywhere.
  static ProbDist uniform(const FiniteAbelianGroup& group) {
    return ProbDist(group, std::vector<double>(group.order(), 1.0 / static_cast<double>(group.order())));
  }

  const FiniteAbelianGroup& group() const { return group_; }
  const std::vector<double>& weights() const { return weights_; }
  double operator()(Element j) const { return weights_.at(j); }

  bool is_valid(double tol = 1e-12) const {
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= -tol)) return false;
      total += w;
    }
    return std::abs(total - 1.0) <= tol;
  }

  void validate(double tol = 1e-12) const {
    if (!is_valid(tol)) throw InvalidParameterError("weights are not a probability distribution");
  }

  double max_abs_diff(const ProbDist& other) const {
    if (!(group_ == other.group_)) throw ShapeError("distributions live on different groups");
    double worst = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      worst = std::max(worst, std::abs(weights_[i] - other.weights_[i]));
    }
    return worst;
  }

 private:
  FiniteAbelianGroup group_;
  std::vector<double> weights_;
};

/// lambda * delta + (1 - lambda) * mu.
inline ProbDist depolarizing_dist(double lambda, const FiniteAbelianGroup& group) {
  require_unit_interval(lambda, "lambda");
  const double d = static_cast<double>(group.order());
  std::vector<double> w(group.order(), (1.0 - lambda) / d);
  w[0] = lambda + (1.0 - lambda) / d;
  return ProbDist(group, std::move(w));
}

enum class OutcomeSpace {
  kGroup,       // outcomes j in G
  kPhaseSpace,  // outcomes (j, k) in G x G, stored at j*d + k
};

/// Finite-outcome POVM with group (or phase-space) labelled outcomes. Effects
/// are stored dense. Not validated on construction; see validate().
class Povm {
 public:
  Povm(FiniteAbelianGroup group, OutcomeSpace space, std::vector<Operator> effects)
      : group_(std::move(group)), space_(space), effects_(std::move(effects)) {}

  const FiniteAbelianGroup& group() const { return group_; }
  OutcomeSpace space() const { return space_; }
  std::size_t dim() const { return group_.order(); }
  std::size_t size() const { return effects_.size(); }
  std::size_t expected_size() const {
    return space_ == OutcomeSpace::kGroup ? dim() : dim() * dim();
  }
  const std::vector<Operator>& effects() const { return effects_; }

  const Operator& operator()(Element j) const {
    require(OutcomeSpace::kGroup);
    return effects_.at(j);
  }
  const Operator& operator()(Element j, Element k) const {
    require(OutcomeSpace::kPhaseSpace);
    if (j >= dim() || k >= dim()) throw IndexError("phase-space outcome out of range");
    return effects_.at(j * dim() + k);
  }

 private:
  void require(OutcomeSpace s) const {
    if (space_ != s) {
      throw ShapeError(s == OutcomeSpace::kGroup ? "POVM outcomes are pairs, not group elements"
                                                 : "POVM outcomes are group elements, not pairs");
    }
  }

  FiniteAbelianGroup group_;
  OutcomeSpace space_;
  std::vector<Operator> effects_;
};

struct PovmReport {
  bool outcome_count_ok = false;
  bool shapes_ok = false;
  double min_eigenvalue = 0.0;
  double max_hermiticity_error = 0.0;
  double completeness_error = 0.0;
  bool positive = false;
  bool complete = false;

  bool valid() const { return outcome_count_ok && shapes_ok && positive && complete; }
};

inline PovmReport validate(const Povm& povm, const Tolerances& tol = {}) {
  PovmReport report;
  const auto d = static_cast<Eigen::Index>(povm.dim());
  report.outcome_count_ok = povm.size() == povm.expected_size();
  report.shapes_ok = std::all_of(povm.effects().begin(), povm.effects().end(), [&](const Operator& e) {
    return e.rows() == d && e.cols() == d && e.allFinite();
  });
  if (!report.shapes_ok || povm.size() == 0) {
    report.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    report.completeness_error = std::numeric_limits<double>::infinity();
    return report;
  }
  Operator total = Operator::Zero(d, d);
  report.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const Operator& e : povm.effects()) {
    total += e;
    report.max_hermiticity_error = std::max(report.max_hermiticity_error, max_abs(e - e.adjoint()));
    report.min_eigenvalue = std::min(report.min_eigenvalue, min_eigenvalue(e));
  }
  report.completeness_error = max_abs(total - Operator::Identity(d, d));
  report.positive = report.max_hermiticity_error <= tol.eq && report.min_eigenvalue >= -tol.psd;
  report.complete = report.completeness_error <= tol.eq;
  return report;
}

/// Largest entrywise difference between corresponding effects.
inline double max_effect_difference(const Povm& a, const Povm& b) {
  if (a.size() != b.size() || a.space() != b.space() || a.dim() != b.dim()) {
    throw ShapeError("POVMs have different outcome sets");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, max_abs_diff(a.effects()[i], b.effects()[i]));
  }
  return worst;
}

/// 1/d per outcome.
inline Povm trivial_povm(const WeylSystem& ws) {
  return Povm(ws.group(), OutcomeSpace::kGroup,
              std::vector<Operator>(ws.dim(), ws.identity() / static_cast<double>(ws.dim())));
}

struct ConjugatePair {
  Povm position;  // A(j) = |phi_j><phi_j|
  Povm momentum;  // B(k) = |psi_k><psi_k|
};

inline ConjugatePair conjugate_pair(const WeylSystem& ws) {
  std::vector<Operator> a;
  std::vector<Operator> b;
  for (Element j = 0; j < ws.dim(); ++j) {
    a.push_back(projector(ws.basis_vector(j)));
    b.push_back(projector(ws.fourier_vector(j)));
  }
  return {Povm(ws.group(), OutcomeSpace::kGroup, std::move(a)),
          Povm(ws.group(), OutcomeSpace::kGroup, std::move(b))};
}

/// E_dist(j) = sum_i dist(j - i) E(i).
inline Povm smear(const Povm& base, const ProbDist& dist) {
  if (base.space() != OutcomeSpace::kGroup) throw ShapeError("smearing needs group-indexed outcomes");
  if (!(base.group() == dist.group())) throw ShapeError("distribution and POVM live on different groups");
  if (base.size() != base.expected_size()) throw ShapeError("POVM has the wrong number of effects");
  const FiniteAbelianGroup& g = base.group();
  const auto d = static_cast<Eigen::Index>(g.order());
  std::vector<Operator> out(g.order(), Operator::Zero(d, d));
  for (Element j = 0; j < g.order(); ++j) {
    for (Element i = 0; i < g.order(); ++i) {
      const double w = dist(g.subtract(j, i));
      if (w != 0.0) out[j] += w * base(i);
    }
  }
  return Povm(g, OutcomeSpace::kGroup, std::move(out));
}

/// E(j) = lambda base(j) + (1 - lambda) bias(j) 1.
inline Povm biased_smear(const Povm& base, double lambda, const ProbDist& bias) {
  require_unit_interval(lambda, "lambda");
  if (base.space() != OutcomeSpace::kGroup) throw ShapeError("biased smearing needs group-indexed outcomes");
  if (!(base.group() == bias.group())) throw ShapeError("bias and POVM live on different groups");
  if (base.size() != base.expected_size()) throw ShapeError("POVM has the wrong number of effects");
  const auto d = static_cast<Eigen::Index>(base.dim());
  std::vector<Operator> out;
  out.reserve(base.size());
  for (Element j = 0; j < base.size(); ++j) {
    out.push_back(lambda * base(j) + (1.0 - lambda) * bias(j) * Operator::Identity(d, d));
  }
  return Povm(base.group(), OutcomeSpace::kGroup, std::move(out));
}

struct CovarianceReport {
  // Group-indexed POVMs.
  bool u_covariant = false;  // U_x E(j) U_x^* = E(j + x)
  bool v_invariant = false;  // V_y E(j) V_y^* = E(j)
  bool u_invariant = false;  // U_x E(k) U_x^* = E(k)
  bool v_covariant = false;  // V_y E(k) V_y^* = E(k + y)
  // Phase-space POVMs: U_x V_y C(j,k) V_y^* U_x^* = C(j + x, k + y).
  bool phase_space_covariant = false;
};

inline CovarianceReport check_covariance(const Povm& povm, const WeylSystem& ws, const Tolerances& tol = {}) {
  if (!(povm.group() == ws.group()) || povm.size() != povm.expected_size()) {
    throw ShapeError("POVM does not match the Weyl system");
  }
  CovarianceReport report;
  const std::size_t d = ws.dim();
  if (povm.space() == OutcomeSpace::kGroup) {
    double u_cov = 0.0, v_inv = 0.0, u_inv = 0.0, v_cov = 0.0;
    for (Element j = 0; j < d; ++j) {
      for (Element x = 0; x < d; ++x) {
        const Operator shifted = ws.conjugate(povm(j), x, 0);
        u_cov = std::max(u_cov, max_abs_diff(shifted, povm(ws.add(j, x))));
        u_inv = std::max(u_inv, max_abs_diff(shifted, povm(j)));
        const Operator phased = ws.conjugate(povm(j), 0, x);
        v_inv = std::max(v_inv, max_abs_diff(phased, povm(j)));
        v_cov = std::max(v_cov, max_abs_diff(phased, povm(ws.add(j, x))));
      }
    }
    report.u_covariant = u_cov <= tol.eq;
    report.v_invariant = v_inv <= tol.eq;
    report.u_invariant = u_inv <= tol.eq;
    report.v_covariant = v_cov <= tol.eq;
  } else {
    double worst = 0.0;
    for (Element j = 0; j < d; ++j) {
      for (Element k = 0; k < d; ++k) {
        for (Element x = 0; x < d; ++x) {
          for (Element y = 0; y < d; ++y) {
            worst = std::max(worst, max_abs_diff(ws.conjugate(povm(j, k), x, y),
                                                 povm(ws.add(j, x), ws.add(k, y))));
          }
        }
      }
    }
    report.phase_space_covariant = worst <= tol.eq;
  }
  return report;
}

struct MarginalPair {
  Povm first;   // sum over k of C(., k)
  Povm second;  // sum over j of C(j, .)
};

inline MarginalPair marginals(const Povm& joint) {
  if (joint.space() != OutcomeSpace::kPhaseSpace || joint.size() != joint.expected_size()) {
    throw ShapeError("marginals need a POVM on G x G");
  }
  const std::size_t d = joint.dim();
  const auto n = static_cast<Eigen::Index>(d);
  std::vector<Operator> first(d, Operator::Zero(n, n));
  std::vector<Operator> second(d, Operator::Zero(n, n));
  for (Element j = 0; j < d; ++j) {
    for (Element k = 0; k < d; ++k) {
      first[j] += joint(j, k);
      second[k] += joint(j, k);
    }
  }
  return {Povm(joint.group(), OutcomeSpace::kGroup, std::move(first)),
          Povm(joint.group(), OutcomeSpace::kGroup, std::move(second))};
}

/// Complete set of p + 1 mutually unbiased bases for an odd prime p.
struct MubFamily {
  std::size_t p = 0;
  /// bases[0] is the reference basis {phi_j}; bases[a + 1] holds
  /// psi^a_k = p^{-1/2} sum_x omega^{a x^2 + k x} phi_x as column k.
  std::vector<Operator> bases;
  /// legendre[a] = (a|p).
  std::vector<int> legendre;

  std::size_t size() const { return bases.size(); }
};

inline MubFamily mub_family_prime(std::size_t p) {
  if (p < 3 || !is_prime(p)) {
    throw InvalidParameterError("MUB construction needs an odd prime, got " + std::to_string(p));
  }
  MubFamily family;
  family.p = p;
  const auto n = static_cast<Eigen::Index>(p);
  const double norm = 1.0 / std::sqrt(static_cast<double>(p));
  family.bases.push_back(Operator::Identity(n, n));
  for (std::size_t a = 0; a < p; ++a) {
    Operator basis(n, n);
    for (std::size_t k = 0; k < p; ++k) {
      for (std::size_t x = 0; x < p; ++x) {
        const long long e = static_cast<long long>((a * x % p * x + k * x) % p);
        basis(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(k)) = norm * root_of_unity(e, p);
      }
    }
    family.bases.push_back(std::move(basis));
  }
  for (std::size_t a = 0; a < p; ++a) family.legendre.push_back(legendre_symbol(static_cast<long long>(a), p));
  return family;
}

}  // namespace qjoint
