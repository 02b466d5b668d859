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
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qjoint/core.hpp"
#include "qjoint/jointness.hpp"
#include "qjoint/observables.hpp"
#include "qjoint/state.hpp"
#include "qjoint/weyl.hpp"

namespace qjoint {

/// Weyl expansion coefficients c(x, y) = tr(A V_y^* U_x^*), stored at x*d + y.
class WeylCoefficients {
 public:
  WeylCoefficients(WeylSystem ws, std::vector<Complex> values)
      : ws_(std::move(ws)), values_(std::move(values)) {}

  Complex operator()(Element x, Element y) const { return values_.at(x * ws_.dim() + y); }
  const std::vector<Complex>& values() const { return values_; }

  /// (1/d) sum_{x,y} c(x, y) U_x V_y.
  Operator reconstruct() const {
    const std::size_t d = ws_.dim();
    const auto n = static_cast<Eigen::Index>(d);
    Operator a = Operator::Zero(n, n);
    for (Element x = 0; x < d; ++x) {
      for (Element y = 0; y < d; ++y) {
        const Complex c = values_[x * d + y];
        if (c == Complex(0.0)) continue;
        for (Element h = 0; h < d; ++h) a(ws_.add(h, x), h) += c * ws_.character(y, h);
      }
    }
    return a / static_cast<double>(d);
  }

 private:
  WeylSystem ws_;
  std::vector<Complex> values_;
};

inline WeylCoefficients weyl_coefficients(const Operator& a, const WeylSystem& ws) {
  const std::size_t d = ws.dim();
  if (static_cast<std::size_t>(a.rows()) != d || static_cast<std::size_t>(a.cols()) != d) {
    throw ShapeError("operator dimension does not match the Weyl system");
  }
  std::vector<Complex> values(d * d);
  for (Element x = 0; x < d; ++x) {
    for (Element y = 0; y < d; ++y) {
      Complex c = 0.0;
      for (Element h = 0; h < d; ++h) c += a(ws.add(h, x), h) * std::conj(ws.character(y, h));
      values[x * d + y] = c;
    }
  }
  return WeylCoefficients(ws, std::move(values));
}

/// tr(T U_x V_y) at x*d + y.
inline std::vector<Complex> generator_coefficients(const Operator& t, const WeylSystem& ws) {
  const std::size_t d = ws.dim();
  std::vector<Complex> values(d * d);
  for (Element x = 0; x < d; ++x) {
    for (Element y = 0; y < d; ++y) {
      Complex c = 0.0;
      for (Element h = 0; h < d; ++h) c += ws.character(y, h) * t(h, ws.add(h, x));
      values[x * d + y] = c;
    }
  }
  return values;
}

struct ICReport {
  std::size_t span_rank = 0;
  bool is_ic_by_span = false;
  /// tr(T U_x V_y) at x*d + y; empty unless a generator was examined.
  std::vector<Complex> weyl_coefficients;
  double min_abs_coefficient = std::numeric_limits<double>::quiet_NaN();
  Element min_x = 0;
  Element min_y = 0;
  bool is_ic_by_criterion = false;
};

/// Rank of the span of the effects; IC iff it is d^2.
inline ICReport ic_by_span(const Povm& povm, const Tolerances& tol = {}) {
  const std::size_t d = povm.dim();
  const auto n = static_cast<Eigen::Index>(d);
  Operator rows(static_cast<Eigen::Index>(povm.size()), n * n);
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const Operator& e = povm.effects()[i];
    rows.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXcd>(e.data(), n * n);
  }
  ICReport report;
  report.span_rank = numerical_rank(rows, tol.rank);
  report.is_ic_by_span = report.span_rank == d * d;
  return report;
}

/// C_T is IC iff every tr(T U_x V_y) is nonzero.
inline ICReport ic_by_criterion(const DensityOperator& t, const WeylSystem& ws, const Tolerances& tol = {}) {
  if (t.dim() != ws.dim()) throw StateError("generator dimension does not match the Weyl system");
  ICReport report;
  report.weyl_coefficients = generator_coefficients(t.matrix(), ws);
  const std::size_t d = ws.dim();
  report.min_abs_coefficient = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < report.weyl_coefficients.size(); ++i) {
    const double magnitude = std::abs(report.weyl_coefficients[i]);
    if (magnitude < report.min_abs_coefficient) {
      report.min_abs_coefficient = magnitude;
      report.min_x = i / d;
      report.min_y = i % d;
    }
  }
  report.is_ic_by_criterion = report.min_abs_coefficient > tol.ic;
  return report;
}

/// Both tests for C_T.
inline ICReport ic_report(const DensityOperator& t, const WeylSystem& ws, const Tolerances& tol = {}) {
  ICReport report = ic_by_criterion(t, ws, tol);
  const ICReport span = ic_by_span(covariant_observable(t, ws).povm(), tol);
  report.span_rank = span.span_rank;
  report.is_ic_by_span = span.is_ic_by_span;
  return report;
}

/// p(j, k) = tr(rho E(j, k)) at j*d + k (or j for group-indexed POVMs).
inline std::vector<double> outcome_distribution(const Operator& rho, const Povm& povm) {
  std::vector<double> p;
  p.reserve(povm.size());
  for (const Operator& e : povm.effects()) p.push_back(trace_product(rho, e).real());
  return p;
}

/// The factorization V_T = R (F (x) F^*) M_T Phi of the map
/// A -> [tr(C_T(h,k) A)]_{h,k}, with each factor exposed so that it can be
/// inverted separately. Vectors in H (x) H and functions on G x G are both
/// stored at index x*d + y.
class TomographyPipeline {
 public:
  TomographyPipeline(WeylSystem ws, DensityOperator generator, Tolerances tol = {})
      : ws_(std::move(ws)), generator_(std::move(generator)), tol_(tol) {
    if (generator_.dim() != ws_.dim()) throw StateError("generator dimension does not match the Weyl system");
    coefficients_ = generator_coefficients(generator_.matrix(), ws_);
  }

  const WeylSystem& weyl() const { return ws_; }
  const DensityOperator& generator() const { return generator_; }
  const std::vector<Complex>& coefficients() const { return coefficients_; }

  /// First vanishing coefficient (x, y), if any.
  std::optional<std::pair<Element, Element>> vanishing_coefficient() const {
    const std::size_t d = ws_.dim();
    for (std::size_t i = 0; i < coefficients_.size(); ++i) {
      if (std::abs(coefficients_[i]) <= tol_.ic) return std::make_pair(i / d, i % d);
    }
    return std::nullopt;
  }

  /// Phi(A) = (1/d) sum tr(A V_y^* U_x^*) phi_x (x) phi_y.
  Vector weyl_packing(const Operator& a) const {
    const std::vector<Complex> values = weyl_coefficients(a, ws_).values();
    Vector v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = values[i] / static_cast<double>(ws_.dim());
    }
    return v;
  }

  Operator weyl_unpacking(const Vector& v) const {
    std::vector<Complex> values(v.data(), v.data() + v.size());
    for (Complex& c : values) c *= static_cast<double>(ws_.dim());
    return WeylCoefficients(ws_, std::move(values)).reconstruct();
  }

  /// M_T: multiply by tr(T U_x V_y).
  Vector multiply_coefficients(const Vector& v) const {
    Vector out = v;
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) *= coefficients_[static_cast<std::size_t>(i)];
    return out;
  }

  Vector divide_coefficients(const Vector& v) const {
    if (auto bad = vanishing_coefficient()) {
      const std::size_t i = bad->first * ws_.dim() + bad->second;
      throw NotInformationallyCompleteError(bad->first, bad->second, std::abs(coefficients_[i]));
    }
    Vector out = v;
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) /= coefficients_[static_cast<std::size_t>(i)];
    return out;
  }

  /// F (x) F^*.
  Vector fourier_pair(const Vector& v) const {
    const Operator& f = ws_.fourier();
    return from_matrix(f * as_matrix(v) * f.conjugate());
  }

  Vector fourier_pair_inverse(const Vector& v) const {
    const Operator& f = ws_.fourier();
    return from_matrix(f.adjoint() * as_matrix(v) * f.transpose());
  }

  /// (R v)(x, y) = <phi_y (x) phi_x | v>.
  Vector reindex(const Vector& v) const { return from_matrix(as_matrix(v).transpose()); }
  Vector reindex_inverse(const Vector& v) const { return reindex(v); }

  Vector forward(const Operator& a) const {
    return reindex(fourier_pair(multiply_coefficients(weyl_packing(a))));
  }

  /// [tr(C_T(h, k) A)] evaluated directly from the effects.
  Vector direct_forward(const Operator& a) const {
    const PhaseSpaceObservable obs = covariant_observable(generator_, ws_);
    const Povm& c = obs.povm();
    Vector out(static_cast<Eigen::Index>(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) out(static_cast<Eigen::Index>(i)) = trace_product(c.effects()[i], a);
    return out;
  }

  /// Phi^{-1} M_T^{-1} (F (x) F^*)^{-1} R^{-1}: the exact linear inverse.
  Operator invert(const Vector& table) const {
    if (static_cast<std::size_t>(table.size()) != ws_.dim() * ws_.dim()) {
      throw InputError("outcome table has the wrong size");
    }
    return weyl_unpacking(divide_coefficients(fourier_pair_inverse(reindex_inverse(table))));
  }

 private:
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Operator as_matrix(const Vector& v) const {
    const auto n = static_cast<Eigen::Index>(ws_.dim());
    return Eigen::Map<const RowMajor>(v.data(), n, n);
  }
  static Vector from_matrix(const Operator& m) {
    RowMajor r = m;
    return Eigen::Map<const Vector>(r.data(), r.size());
  }

  WeylSystem ws_;
  DensityOperator generator_;
  Tolerances tol_;
  std::vector<Complex> coefficients_;
};

/// Linear-inversion estimate from an outcome table p(j, k) at j*d + k. The
/// result is symmetrized and trace-normalized but not projected onto states.
inline Operator tomography_reconstruct(const std::vector<double>& probs, const DensityOperator& t,
                                       const WeylSystem& ws, const Tolerances& tol = {}) {
  const std::size_t d = ws.dim();
  if (probs.size() != d * d) {
    throw InputError("outcome table has " + std::to_string(probs.size()) + " entries, expected " +
                     std::to_string(d * d));
  }
  double total = 0.0;
  for (double p : probs) total += p;
  if (std::abs(total - 1.0) > 1e-9) {
    throw InputError("outcome probabilities sum to " + std::to_string(total) + ", not 1");
  }
  const TomographyPipeline pipeline(ws, t, tol);
  Vector table(static_cast<Eigen::Index>(probs.size()));
  for (std::size_t i = 0; i < probs.size(); ++i) table(static_cast<Eigen::Index>(i)) = probs[i];
  Operator rho = hermitian_part(pipeline.invert(table));
  return rho / rho.trace().real();
}

enum class ICBranch { kOdd, kEven };

/// Generator of an informationally complete covariant joint observable of
/// A_lambda and B_gamma for an interior point of the jointly measurable region.
struct ICConstruction {
  double lambda = 0.0;
  double gamma = 0.0;
  double t0 = 0.0;
  double tau = 0.0;
  double lambda0 = 0.0;
  double gamma0 = 0.0;
  double alpha0 = 0.0;
  double beta0 = 0.0;
  ICBranch branch = ICBranch::kOdd;
  // Even dimension only.
  double kappa = 0.0;
  double kappa_bound = 0.0;
  double epsilon = 0.0;
  double delta_max = 0.0;
  std::vector<Operator> x_terms;  // X_k
  Operator x_sum;                 // X = sum_k X_k
  Operator s_kappa;               // 1/d + kappa X
  std::optional<DensityOperator> generator;

  PhaseSpaceObservable observable(const WeylSystem& ws) const { return covariant_observable(*generator, ws); }
};

/// Odd d: T = (1 - tau)|chi_{lambda0}><chi_{lambda0}| + tau 1/d.
/// Even d: the maximally mixed part is replaced by S_kappa = 1/d + kappa X,
/// which keeps trivial marginals and lifts the coefficients where omega^{-xy} = -1.
/// kappa is half the admissible bound.
inline ICConstruction construct_ic_joint(double lambda, double gamma, const WeylSystem& ws) {
  require_unit_interval(lambda, "lambda");
  require_unit_interval(gamma, "gamma");
  if (!ws.group().is_cyclic()) throw PreconditionError("IC construction is defined for cyclic groups");
  if (lambda == 0.0 || lambda == 1.0) {
    throw PreconditionError("lambda in {0, 1}: a trivial marginal rules out informational completeness");
  }
  if (gamma == 0.0) throw PreconditionError("gamma = 0: a trivial marginal rules out informational completeness");
  const std::size_t d = ws.dim();
  const double gmax = gamma_max_value(lambda, d);
  if (gamma >= gmax) {
    throw OutOfInteriorError("gamma must be strictly below gamma_max(lambda) = " + std::to_string(gmax) +
                             "; on the boundary the joint observable is unique");
  }

  ICConstruction out;
  out.lambda = lambda;
  out.gamma = gamma;
  out.t0 = ray_boundary_parameter(lambda, gamma, d);
  out.tau = 1.0 - 1.0 / out.t0;
  out.lambda0 = std::min(out.t0 * lambda, 1.0);
  const BoundaryPoint edge = gamma_max(out.lambda0, d);
  out.gamma0 = edge.gamma_max;
  out.alpha0 = edge.alpha;
  out.beta0 = edge.beta;
  const Operator pure = projector(edge.chi);
  const double dd = static_cast<double>(d);

  if (d % 2 == 1) {
    out.branch = ICBranch::kOdd;
    Operator t = (1.0 - out.tau) * pure + (out.tau / dd) * ws.identity();
    out.generator = DensityOperator(hermitian_part(t));
    return out;
  }

  out.branch = ICBranch::kEven;
  const auto n = static_cast<Eigen::Index>(d);
  const Complex half_i(0.0, 0.5);
  out.x_sum = Operator::Zero(n, n);
  for (Element k = 0; k < d; ++k) {
    const auto plus = static_cast<Eigen::Index>(k);
    const auto minus = static_cast<Eigen::Index>(ws.negate(k));
    Operator xk = Operator::Zero(n, n);
    xk(minus, 0) += half_i;
    xk(0, minus) -= half_i;
    xk(plus, 0) += half_i;
    xk(0, plus) -= half_i;
    out.x_sum += xk;
    out.x_terms.push_back(std::move(xk));
  }
  out.epsilon = std::numeric_limits<double>::infinity();
  out.delta_max = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double magnitude = std::abs(root_of_unity(static_cast<long long>(k), d) + 1.0);
    if (k != d / 2) out.epsilon = std::min(out.epsilon, magnitude);
    out.delta_max = std::max(out.delta_max, magnitude);
  }
  const double x_norm = hermitian_norm(out.x_sum);
  const double overlap_bound =
      out.alpha0 * out.beta0 * (1.0 - out.tau) * out.epsilon / (out.tau * out.delta_max * std::sqrt(dd));
  out.kappa_bound = std::min(overlap_bound, 1.0 / (dd * x_norm));
  out.kappa = 0.5 * out.kappa_bound;
  out.s_kappa = ws.identity() / dd + out.kappa * out.x_sum;
  Operator t = (1.0 - out.tau) * pure + out.tau * out.s_kappa;
  out.generator = DensityOperator(hermitian_part(t));
  return out;
}

inline ICConstruction construct_ic_joint(double lambda, double gamma, std::size_t d) {
  return construct_ic_joint(lambda, gamma, WeylSystem(d));
}

/// Span-rank check for a joint observable with a trivial marginal: the span
/// has dimension at most 1 + d(d - 1).
struct RankBoundCheck {
  std::size_t span_rank = 0;
  std::size_t bound = 0;
  bool first_trivial = false;
  bool second_trivial = false;
  bool holds = false;
};

inline RankBoundCheck trivial_marginal_rank_bound(const Povm& joint, const Tolerances& tol = {}) {
  const MarginalPair m = marginals(joint);
  const std::size_t d = joint.dim();
  const Operator flat = Operator::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) /
                        static_cast<double>(d);
  auto trivial = [&](const Povm& p) {
    return std::all_of(p.effects().begin(), p.effects().end(),
                       [&](const Operator& e) { return max_abs_diff(e, flat) <= tol.eq; });
  };
  RankBoundCheck check;
  check.first_trivial = trivial(m.first);
  check.second_trivial = trivial(m.second);
  if (!check.first_trivial && !check.second_trivial) {
    throw PreconditionError("neither marginal is the trivial observable");
  }
  check.span_rank = ic_by_span(joint, tol).span_rank;
  check.bound = 1 + d * (d - 1);
  check.holds = check.span_rank <= check.bound;
  return check;
}

}  // namespace qjoint
