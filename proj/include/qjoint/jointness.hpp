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
#include <optional>
#include <utility>
#include <vector>

#include "qjoint/core.hpp"
#include "qjoint/observables.hpp"
#include "qjoint/state.hpp"
#include "qjoint/weyl.hpp"

namespace qjoint {

/// Covariant phase-space observable C_T(j,k) = (1/d) U_j V_k T V_k^* U_j^*.
/// Effects are materialized on construction.
class PhaseSpaceObservable {
 public:
  PhaseSpaceObservable(WeylSystem ws, DensityOperator generator)
      : ws_(std::move(ws)), generator_(std::move(generator)), povm_(build(ws_, generator_)) {}

  const WeylSystem& weyl() const { return ws_; }
  const DensityOperator& generator() const { return generator_; }
  const Povm& povm() const { return povm_; }
  const Operator& effect(Element j, Element k) const { return povm_(j, k); }

 private:
  static Povm build(const WeylSystem& ws, const DensityOperator& t) {
    if (t.dim() != ws.dim()) throw StateError("generator dimension does not match the Weyl system");
    const std::size_t d = ws.dim();
    const Operator scaled = t.matrix() / static_cast<double>(d);
    std::vector<Operator> effects;
    effects.reserve(d * d);
    for (Element j = 0; j < d; ++j) {
      for (Element k = 0; k < d; ++k) effects.push_back(ws.conjugate(scaled, j, k));
    }
    return Povm(ws.group(), OutcomeSpace::kPhaseSpace, std::move(effects));
  }

  WeylSystem ws_;
  DensityOperator generator_;
  Povm povm_;
};

inline PhaseSpaceObservable covariant_observable(const DensityOperator& t, const WeylSystem& ws) {
  return PhaseSpaceObservable(ws, t);
}

struct GeneratorMarginals {
  ProbDist position;  // Lambda(j) = tr[A(-j) T]
  ProbDist momentum;  // Gamma(k) = tr[B(-k) T]
};

/// Smearing distributions of the marginals of C_T.
inline GeneratorMarginals generator_marginal_dists(const DensityOperator& t, const WeylSystem& ws) {
  if (t.dim() != ws.dim()) throw StateError("generator dimension does not match the Weyl system");
  const std::size_t d = ws.dim();
  std::vector<double> lambda(d), gamma(d);
  for (Element j = 0; j < d; ++j) {
    const Element minus = ws.negate(j);
    lambda[j] = t.matrix()(static_cast<Eigen::Index>(minus), static_cast<Eigen::Index>(minus)).real();
    const Vector psi = ws.fourier_vector(minus);
    gamma[j] = psi.dot(t.matrix() * psi).real();
  }
  return {ProbDist(ws.group(), std::move(lambda)), ProbDist(ws.group(), std::move(gamma))};
}

/// tr_2 |phi><phi| for phi in H (x) H, stored at index i*d + m.
inline Operator partial_trace_second(const Vector& phi, std::size_t d) {
  if (static_cast<std::size_t>(phi.size()) != d * d) throw ShapeError("vector is not in H (x) H");
  const auto n = static_cast<Eigen::Index>(d);
  const Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      phi.data(), n, n);
  return m * m.adjoint();
}

/// Lambda(j) = <phi|(A(-j) (x) 1) phi>, Gamma(k) = <phi|(B(-k) (x) 1) phi>.
inline GeneratorMarginals marginals_from_purification(const Vector& phi, const WeylSystem& ws) {
  const std::size_t d = ws.dim();
  if (static_cast<std::size_t>(phi.size()) != d * d) throw ShapeError("vector is not in H (x) H");
  if (std::abs(phi.norm() - 1.0) > 1e-12) throw StateError("purification must be a unit vector");
  const auto n = static_cast<Eigen::Index>(d);
  const Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      phi.data(), n, n);
  std::vector<double> lambda(d), gamma(d);
  for (Element j = 0; j < d; ++j) {
    const Element minus = ws.negate(j);
    lambda[j] = m.row(static_cast<Eigen::Index>(minus)).squaredNorm();
    // (<psi_{-k}| (x) 1) phi
    const Eigen::RowVectorXcd projected = ws.fourier_vector(minus).adjoint() * m;
    gamma[j] = projected.squaredNorm();
  }
  return {ProbDist(ws.group(), std::move(lambda)), ProbDist(ws.group(), std::move(gamma))};
}

/// Uniform average of U_x^* V_y^* C(j + x, k + y) V_y U_x over the phase space.
/// The result is covariant and has generator T = d * C~(0, 0).
inline PhaseSpaceObservable covariantize(const Povm& joint, const WeylSystem& ws) {
  if (joint.space() != OutcomeSpace::kPhaseSpace || !(joint.group() == ws.group()) ||
      joint.size() != joint.expected_size()) {
    throw ShapeError("covariantization needs a POVM on G x G matching the Weyl system");
  }
  const std::size_t d = ws.dim();
  const auto n = static_cast<Eigen::Index>(d);
  Operator origin = Operator::Zero(n, n);
  for (Element x = 0; x < d; ++x) {
    for (Element y = 0; y < d; ++y) origin += ws.conjugate_inverse(joint(x, y), x, y);
  }
  origin /= static_cast<double>(d);  // d * (1/d^2) * sum
  return PhaseSpaceObservable(ws, DensityOperator(hermitian_part(origin)));
}

/// gamma_max(lambda) = (1/d) [ (d-2)(1-lambda) + 2 sqrt((1-d) lambda^2 + (d-2) lambda + 1) ].
inline double gamma_max_value(double lambda, std::size_t d) {
  require_unit_interval(lambda, "lambda");
  if (d < 2) throw InvalidParameterError("dimension must be >= 2");
  const double dd = static_cast<double>(d);
  const double radicand = (1.0 - dd) * lambda * lambda + (dd - 2.0) * lambda + 1.0;
  const double value = ((dd - 2.0) * (1.0 - lambda) + 2.0 * std::sqrt(std::max(radicand, 0.0))) / dd;
  return std::clamp(value, 0.0, 1.0);
}

/// Point (lambda, gamma_max(lambda)) of the boundary and the generator vector
/// chi = alpha phi_0 + beta psi_0 of its unique joint observable.
struct BoundaryPoint {
  double lambda = 0.0;
  double gamma_max = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  Vector chi;
};

inline BoundaryPoint gamma_max(double lambda, std::size_t d) {
  BoundaryPoint point;
  point.lambda = lambda;
  point.gamma_max = gamma_max_value(lambda, d);
  const auto amps = unsharpness_amplitudes(lambda, d);
  point.alpha = amps.alpha;
  point.beta = amps.beta;
  const auto n = static_cast<Eigen::Index>(d);
  // phi_0 is the first basis vector and psi_0 the uniform superposition for any group of order d.
  point.chi = Vector::Constant(n, Complex(point.beta / std::sqrt(static_cast<double>(d))));
  point.chi(0) += point.alpha;
  return point;
}

/// lambda = gamma fixed point of the boundary: (d + sqrt(d) - 2) / (2(d - 1)).
inline double equal_unsharpness_point(std::size_t d) {
  const double dd = static_cast<double>(d);
  return (dd + std::sqrt(dd) - 2.0) / (2.0 * (dd - 1.0));
}

/// gamma^2 + lambda^2 + (2(d-2)/d)(1-gamma)(1-lambda); the ellipse is this <= 1.
inline double ellipse_value(double lambda, double gamma, std::size_t d) {
  const double c = 2.0 * (static_cast<double>(d) - 2.0) / static_cast<double>(d);
  return gamma * gamma + lambda * lambda + c * (1.0 - gamma) * (1.0 - lambda);
}

/// Roots in the free variable of the ellipse equation with the other variable
/// held at `fixed`; the region is symmetric so the same routine serves both.
struct EllipseChord {
  bool real = false;
  double lower = 0.0;
  double upper = 0.0;
};

inline EllipseChord ellipse_chord(double fixed, std::size_t d) {
  const double c = 2.0 * (static_cast<double>(d) - 2.0) / static_cast<double>(d);
  // g^2 - c(1-f) g + (f^2 + c(1-f) - 1) = 0
  const double b = c * (1.0 - fixed);
  const double disc = b * b - 4.0 * (fixed * fixed + c * (1.0 - fixed) - 1.0);
  EllipseChord chord;
  if (disc < -1e-14) return chord;
  const double root = std::sqrt(std::max(disc, 0.0));
  chord.real = true;
  chord.lower = (b - root) / 2.0;
  chord.upper = (b + root) / 2.0;
  return chord;
}

/// Largest lambda jointly measurable with B_gamma, obtained by solving the
/// symmetric region in lambda.
inline double lambda_max(double gamma, std::size_t d) {
  require_unit_interval(gamma, "gamma");
  const EllipseChord chord = ellipse_chord(gamma, d);
  return std::clamp(chord.upper, 0.0, 1.0);
}

struct LinearCriteria {
  bool sufficient = false;  // gamma + lambda <= 1
  bool necessary = false;   // gamma + lambda <= 1 + (sqrt(d) - 1)/(d - 1)
};

inline LinearCriteria linear_criteria(double lambda, double gamma, std::size_t d) {
  require_unit_interval(lambda, "lambda");
  require_unit_interval(gamma, "gamma");
  const double dd = static_cast<double>(d);
  const double sum = lambda + gamma;
  return {sum <= 1.0, sum <= 1.0 + (std::sqrt(dd) - 1.0) / (dd - 1.0)};
}

/// t0 > 0 with t0 (lambda, gamma) on the upper ellipse arc: the larger root of
/// (l^2 + g^2 + c l g) t^2 - c (l + g) t + (c - 1) = 0. Infinite at the origin.
inline double ray_boundary_parameter(double lambda, double gamma, std::size_t d) {
  require_unit_interval(lambda, "lambda");
  require_unit_interval(gamma, "gamma");
  if (lambda == 0.0 && gamma == 0.0) return std::numeric_limits<double>::infinity();
  // On an axis the ray meets the ellipse where it is tangent to the square, a
  // double root; solve it exactly since the discriminant is pure cancellation.
  if (gamma == 0.0) return 1.0 / lambda;
  if (lambda == 0.0) return 1.0 / gamma;
  const double c = 2.0 * (static_cast<double>(d) - 2.0) / static_cast<double>(d);
  const double a = lambda * lambda + gamma * gamma + c * lambda * gamma;
  const double b = c * (lambda + gamma);
  const double disc = std::max(b * b - 4.0 * a * (c - 1.0), 0.0);
  return (b + std::sqrt(disc)) / (2.0 * a);
}

/// Generator of a covariant joint observable of A_lambda and B_gamma:
/// T = (1 - tau) |chi_{lambda0}><chi_{lambda0}| + tau 1/d, tau = 1 - 1/t0.
struct JointCertificate {
  double t0 = 1.0;
  double tau = 0.0;
  double lambda0 = 0.0;
  double gamma0 = 0.0;
  DensityOperator generator;
};

inline JointCertificate joint_certificate(double lambda, double gamma, const WeylSystem& ws) {
  const std::size_t d = ws.dim();
  const double t0 = std::max(ray_boundary_parameter(lambda, gamma, d), 1.0);
  if (std::isinf(t0)) {
    return {t0, 1.0, 0.0, 0.0, DensityOperator::maximally_mixed(d)};
  }
  const double tau = 1.0 - 1.0 / t0;
  const double lambda0 = std::min(t0 * lambda, 1.0);
  const BoundaryPoint edge = gamma_max(lambda0, d);
  Operator t = (1.0 - tau) * projector(edge.chi) + (tau / static_cast<double>(d)) * ws.identity();
  return {t0, tau, lambda0, edge.gamma_max, DensityOperator(hermitian_part(t))};
}

struct JointnessVerdict {
  bool jointly_measurable = false;
  double gamma_max = 0.0;
  bool linear_clause = false;   // gamma + lambda <= 1
  bool ellipse_clause = false;  // inside the ellipse, resolved along gamma
  double ellipse_value = 0.0;
  std::optional<JointCertificate> certificate;
};

/// A_lambda and B_gamma are jointly measurable iff gamma + lambda <= 1 or the
/// point lies in the ellipse. The ellipse clause is resolved in the gamma
/// direction (lower root <= gamma <= upper root, each with tol.boundary slack)
/// so that the slack does not depend on where the ellipse is steep.
inline JointnessVerdict is_jointly_measurable(double lambda, double gamma, const WeylSystem& ws,
                                              const Tolerances& tol = {}) {
  require_unit_interval(lambda, "lambda");
  require_unit_interval(gamma, "gamma");
  const std::size_t d = ws.dim();
  JointnessVerdict verdict;
  verdict.gamma_max = gamma_max_value(lambda, d);
  verdict.linear_clause = lambda + gamma <= 1.0 + tol.boundary;
  const EllipseChord chord = ellipse_chord(lambda, d);
  verdict.ellipse_clause =
      chord.real && gamma >= chord.lower - tol.boundary && gamma <= chord.upper + tol.boundary;
  verdict.ellipse_value = ellipse_value(lambda, gamma, d);
  verdict.jointly_measurable = verdict.linear_clause || verdict.ellipse_clause;
  if (verdict.jointly_measurable) verdict.certificate = joint_certificate(lambda, gamma, ws);
  return verdict;
}

inline JointnessVerdict is_jointly_measurable(double lambda, double gamma, std::size_t d,
                                              const Tolerances& tol = {}) {
  return is_jointly_measurable(lambda, gamma, WeylSystem(d), tol);
}

/// Necessary condition for the biased pair A_{lambda;p}, B_{gamma;r}: the
/// covariantized pair A_lambda, B_gamma must be jointly measurable. Not sufficient.
inline bool biased_pair_passes_necessary_test(double lambda, double gamma, std::size_t d,
                                              const Tolerances& tol = {}) {
  require_unit_interval(lambda, "lambda");
  require_unit_interval(gamma, "gamma");
  return gamma <= gamma_max_value(lambda, d) + tol.boundary;
}

/// C_{|chi_lambda><chi_lambda|}: the unique joint observable of A_lambda and B_{gamma_max(lambda)}.
inline PhaseSpaceObservable extremal_joint_observable(double lambda, const WeylSystem& ws) {
  const BoundaryPoint point = gamma_max(lambda, ws.dim());
  return PhaseSpaceObservable(ws, DensityOperator::pure(point.chi));
}

inline PhaseSpaceObservable extremal_joint_observable(double lambda, std::size_t d) {
  return extremal_joint_observable(lambda, WeylSystem(d));
}

}  // namespace qjoint
