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
#include <numbers>
#include <string>
#include <vector>

#include "qjoint/core.hpp"
#include "qjoint/jointness.hpp"
#include "qjoint/observables.hpp"
#include "qjoint/state.hpp"
#include "qjoint/weyl.hpp"

namespace qjoint {

/// Group-indexed instrument in Kraus form: I_j(rho) = sum_i K_{j,i} rho K_{j,i}^*.
class Instrument {
 public:
  Instrument(FiniteAbelianGroup group, std::vector<std::vector<Operator>> kraus)
      : group_(std::move(group)), kraus_(std::move(kraus)) {
    if (kraus_.size() != group_.order()) {
      throw ShapeError("instrument needs one Kraus family per group element");
    }
    const auto d = static_cast<Eigen::Index>(group_.order());
    for (const auto& family : kraus_) {
      for (const Operator& k : family) {
        if (k.rows() != d || k.cols() != d) throw ShapeError("Kraus operator has the wrong dimension");
      }
    }
  }

  const FiniteAbelianGroup& group() const { return group_; }
  std::size_t dim() const { return group_.order(); }
  const std::vector<Operator>& kraus(Element j) const { return kraus_.at(j); }

  /// Schrodinger picture I_j(rho).
  Operator apply(Element j, const Operator& rho) const {
    Operator out = Operator::Zero(rho.rows(), rho.cols());
    for (const Operator& k : kraus(j)) out += k * rho * k.adjoint();
    return out;
  }

  /// Heisenberg picture I_j^*(x) = sum_i K^* x K.
  Operator apply_dual(Element j, const Operator& x) const {
    Operator out = Operator::Zero(x.rows(), x.cols());
    for (const Operator& k : kraus(j)) out += k.adjoint() * x * k;
    return out;
  }

  /// j -> I_j^*(1).
  Povm induced_povm() const {
    const auto d = static_cast<Eigen::Index>(dim());
    std::vector<Operator> effects;
    for (Element j = 0; j < dim(); ++j) effects.push_back(apply_dual(j, Operator::Identity(d, d)));
    return Povm(group_, OutcomeSpace::kGroup, std::move(effects));
  }

  /// Entrywise deviation of sum_j I_j^*(1) from the identity.
  double trace_preservation_error() const {
    const auto d = static_cast<Eigen::Index>(dim());
    Operator total = Operator::Zero(d, d);
    const Povm induced = induced_povm();
    for (const Operator& e : induced.effects()) total += e;
    return max_abs(total - Operator::Identity(d, d));
  }

 private:
  FiniteAbelianGroup group_;
  std::vector<std::vector<Operator>> kraus_;
};

/// One Kraus operator sqrt(E(j)) per outcome.
inline Instrument lueders_instrument(const Povm& povm, const Tolerances& tol = {}) {
  if (povm.space() != OutcomeSpace::kGroup || povm.size() != povm.expected_size()) {
    throw ShapeError("Lueders instrument needs a group-indexed POVM");
  }
  std::vector<std::vector<Operator>> kraus;
  for (const Operator& e : povm.effects()) kraus.push_back({psd_sqrt(e, tol.psd)});
  return Instrument(povm.group(), std::move(kraus));
}

/// C(j, k) = I_j^*(E(k)).
inline Povm sequential_observable(const Instrument& first, const Povm& second) {
  if (!(first.group() == second.group()) || second.space() != OutcomeSpace::kGroup ||
      second.size() != second.expected_size()) {
    throw ShapeError("instrument and second POVM do not match");
  }
  const std::size_t d = first.dim();
  std::vector<Operator> effects;
  effects.reserve(d * d);
  for (Element j = 0; j < d; ++j) {
    for (Element k = 0; k < d; ++k) effects.push_back(first.apply_dual(j, second(k)));
  }
  return Povm(first.group(), OutcomeSpace::kPhaseSpace, std::move(effects));
}

/// Unit vector spanning a rank-one projection.
inline Vector rank_one_vector(const Operator& p, double tol) {
  if (max_abs(p * p - p) > tol || std::abs(p.trace() - Complex(1.0)) > tol ||
      max_abs(p - p.adjoint()) > tol) {
    throw PreconditionError("preparation POVM is not a sharp rank-one observable");
  }
  Eigen::Index best = 0;
  p.colwise().norm().maxCoeff(&best);
  Vector v = p.col(best);
  return v / v.norm();
}

/// Measure-and-prepare instrument I_j(rho) = sum_k tr(rho C(j, k)) |psi_k><psi_k|
/// with Kraus operators |psi_k><m| sqrt(C(j, k)), k and m running over the basis.
inline Instrument instrument_from_joint(const Povm& joint, const Povm& prep, const Tolerances& tol = {}) {
  if (joint.space() != OutcomeSpace::kPhaseSpace || joint.size() != joint.expected_size() ||
      prep.space() != OutcomeSpace::kGroup || prep.size() != prep.expected_size() ||
      !(joint.group() == prep.group())) {
    throw ShapeError("joint observable and preparation basis do not match");
  }
  const std::size_t d = joint.dim();
  const auto n = static_cast<Eigen::Index>(d);
  std::vector<Vector> targets;
  for (Element k = 0; k < d; ++k) targets.push_back(rank_one_vector(prep(k), tol.eq));
  std::vector<std::vector<Operator>> kraus(d);
  for (Element j = 0; j < d; ++j) {
    for (Element k = 0; k < d; ++k) {
      const Operator root = psd_sqrt(joint(j, k), tol.psd);
      for (Eigen::Index m = 0; m < n; ++m) kraus[j].push_back(targets[k] * root.row(m));
    }
  }
  return Instrument(joint.group(), std::move(kraus));
}

/// I_j(rho) = tr(rho E(j)) xi_j.
inline Instrument measure_and_prepare(const Povm& povm, const std::vector<DensityOperator>& xi,
                                      const Tolerances& tol = {}) {
  if (povm.space() != OutcomeSpace::kGroup || povm.size() != povm.expected_size()) {
    throw ShapeError("measure-and-prepare needs a group-indexed POVM");
  }
  if (xi.size() != povm.size()) throw ShapeError("need one prepared state per outcome");
  const auto n = static_cast<Eigen::Index>(povm.dim());
  std::vector<std::vector<Operator>> kraus(povm.size());
  for (Element j = 0; j < povm.size(); ++j) {
    if (xi[j].dim() != povm.dim()) throw ShapeError("prepared state has the wrong dimension");
    const Operator root = psd_sqrt(povm(j), tol.psd);
    Eigen::SelfAdjointEigenSolver<Operator> eig(xi[j].matrix());
    for (Eigen::Index m = 0; m < n; ++m) {
      const double weight = eig.eigenvalues()(m);
      if (weight <= 0.0) continue;
      for (Eigen::Index r = 0; r < n; ++r) {
        kraus[j].push_back(std::sqrt(weight) * eig.eigenvectors().col(m) * root.row(r));
      }
    }
  }
  return Instrument(povm.group(), std::move(kraus));
}

/// Checks U_x V_y I_j(V_y^* U_x^* rho U_x V_y) V_y^* U_x^* = I_{j+x}(rho) on the
/// matrix units |phi_a><phi_b|, which span L(H).
inline bool check_instrument_covariance(const Instrument& ins, const WeylSystem& ws, const Tolerances& tol = {}) {
  if (!(ins.group() == ws.group())) throw ShapeError("instrument does not match the Weyl system");
  const std::size_t d = ws.dim();
  const auto n = static_cast<Eigen::Index>(d);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      Operator unit = Operator::Zero(n, n);
      unit(a, b) = 1.0;
      std::vector<Operator> image;
      for (Element j = 0; j < d; ++j) image.push_back(ins.apply(j, unit));
      for (Element x = 0; x < d; ++x) {
        for (Element y = 0; y < d; ++y) {
          const Operator moved = ws.conjugate_inverse(unit, x, y);
          for (Element j = 0; j < d; ++j) {
            const Operator lhs = ws.conjugate(ins.apply(j, moved), x, y);
            if (max_abs_diff(lhs, image[ws.add(j, x)]) > tol.eq) return false;
          }
        }
      }
    }
  }
  return true;
}

/// max_k | sum_j I_j^*(E(k)) - E(k) |, entrywise. Zero iff the instrument leaves
/// the statistics of `later` untouched.
inline double disturbance(const Instrument& ins, const Povm& later) {
  if (!(ins.group() == later.group()) || later.space() != OutcomeSpace::kGroup) {
    throw ShapeError("instrument and POVM do not match");
  }
  double worst = 0.0;
  for (Element k = 0; k < later.size(); ++k) {
    Operator total = Operator::Zero(later(k).rows(), later(k).cols());
    for (Element j = 0; j < ins.dim(); ++j) total += ins.apply_dual(j, later(k));
    worst = std::max(worst, max_abs(total - later(k)));
  }
  return worst;
}

/// A-measurement on a random lambda-fraction of the ensemble, nothing otherwise:
/// I'_j(rho) = lambda tr(rho A(j)) xi_j + ((1 - lambda)/d) rho.
inline Instrument partial_ensemble_instrument(double lambda, const std::vector<DensityOperator>& xi,
                                              const WeylSystem& ws) {
  require_unit_interval(lambda, "lambda");
  if (xi.size() != ws.dim()) throw ShapeError("need exactly d prepared states");
  const Instrument sharp = measure_and_prepare(conjugate_pair(ws).position, xi);
  std::vector<std::vector<Operator>> kraus(ws.dim());
  const double idle = std::sqrt((1.0 - lambda) / static_cast<double>(ws.dim()));
  for (Element j = 0; j < ws.dim(); ++j) {
    for (const Operator& k : sharp.kraus(j)) kraus[j].push_back(std::sqrt(lambda) * k);
    kraus[j].push_back(idle * ws.identity());
  }
  return Instrument(ws.group(), std::move(kraus));
}

/// C(j, k) = lambda tr(xi_j B(k)) A(j) + ((1 - lambda)/d) B(k).
inline Povm partial_ensemble_sequential(double lambda, const std::vector<DensityOperator>& xi,
                                        const WeylSystem& ws) {
  require_unit_interval(lambda, "lambda");
  if (xi.size() != ws.dim()) throw ShapeError("need exactly d prepared states");
  const auto pair = conjugate_pair(ws);
  const std::size_t d = ws.dim();
  std::vector<Operator> effects;
  for (Element j = 0; j < d; ++j) {
    if (xi[j].dim() != d) throw ShapeError("prepared state has the wrong dimension");
    for (Element k = 0; k < d; ++k) {
      const double overlap = trace_product(xi[j].matrix(), pair.momentum(k)).real();
      effects.push_back(lambda * overlap * pair.position(j) +
                        ((1.0 - lambda) / static_cast<double>(d)) * pair.momentum(k));
    }
  }
  return Povm(ws.group(), OutcomeSpace::kPhaseSpace, std::move(effects));
}

/// Qubit example in the sigma_x / sigma_y frame: first an A_lambda Lueders
/// measurement, then the unitary L_{+-1} = cos(theta/2) 1 -+ i sin(theta/2) sigma_x.
struct QubitSequentialConfig {
  double lambda = 0.0;
  double theta = 0.0;

  void validate() const {
    require_unit_interval(lambda, "lambda");
    if (!(theta >= 0.0 && theta < std::numbers::pi / 2.0)) {
      throw InvalidParameterError("theta must lie in [0, pi/2)");
    }
  }
};

namespace pauli {
inline Operator x() { return (Operator(2, 2) << 0, 1, 1, 0).finished(); }
inline Operator y() { return (Operator(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished(); }
inline Operator z() { return (Operator(2, 2) << 1, 0, 0, -1).finished(); }
}  // namespace pauli

/// W = (1 + i sigma_x + i sigma_y + i sigma_z)/2, the rotation by -2pi/3 about
/// (1,1,1). It sends sigma_x -> sigma_z, sigma_y -> sigma_x, sigma_z -> sigma_y,
/// so the sigma_x / sigma_y pair lands on the canonical pair of Z_2 (A
/// diagonal in {phi_j}, B in the Fourier basis). Outcome +1 maps to 0, -1 to 1.
inline Operator qubit_frame_rotation() {
  return (Operator::Identity(2, 2) + Complex(0, 1) * (pauli::x() + pauli::y() + pauli::z())) / 2.0;
}

/// L_{+-1}, expressed in the canonical frame.
inline Operator qubit_rotation_unitary(const QubitSequentialConfig& cfg, Element outcome) {
  cfg.validate();
  const double sign = outcome == 0 ? 1.0 : -1.0;
  const Operator raw = std::cos(cfg.theta / 2.0) * Operator::Identity(2, 2) -
                       Complex(0, sign * std::sin(cfg.theta / 2.0)) * pauli::x();
  const Operator w = qubit_frame_rotation();
  return w * raw * w.adjoint();
}

/// J_j(rho) = L_j sqrt(A_lambda(j)) rho sqrt(A_lambda(j)) L_j^*, canonical frame.
inline Instrument qubit_rotated_instrument(const QubitSequentialConfig& cfg) {
  cfg.validate();
  const WeylSystem ws(2);
  std::vector<std::vector<Operator>> kraus;
  for (Element j = 0; j < 2; ++j) {
    kraus.push_back({qubit_rotation_unitary(cfg, j) * operator_sqrt_of_smeared_effect(cfg.lambda, j, ws)});
  }
  return Instrument(ws.group(), std::move(kraus));
}

/// C(j, k) = J_j^*(B(k)) on Z_2 x Z_2; theta = 0 is the optimal joint measurement.
inline Povm qubit_rotated_sequential(const QubitSequentialConfig& cfg) {
  const WeylSystem ws(2);
  return sequential_observable(qubit_rotated_instrument(cfg), conjugate_pair(ws).momentum);
}

}  // namespace qjoint
