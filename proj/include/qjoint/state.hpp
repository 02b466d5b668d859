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
#include <random>
#include <string>

#include "qjoint/core.hpp"

namespace qjoint {

/// Positive, unit-trace operator. Construction validates; a DensityOperator
/// that exists is a state within the given tolerances.
class DensityOperator {
 public:
  explicit DensityOperator(Operator rho, const Tolerances& tol = {}) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
      throw StateError("state must be a nonempty square matrix");
    }
    if (!rho_.allFinite()) throw StateError("state has non-finite entries");
    const double asym = max_abs(rho_ - rho_.adjoint());
    if (asym > tol.eq) throw StateError("state is not Hermitian (deviation " + std::to_string(asym) + ")");
    const double trace_error = std::abs(rho_.trace() - Complex(1.0));
    if (trace_error > tol.eq) {
      throw StateError("state trace differs from 1 by " + std::to_string(trace_error));
    }
    const double lowest = min_eigenvalue(rho_);
    if (lowest < -tol.psd) {
      throw StateError("state has negative eigenvalue " + std::to_string(lowest));
    }
  }

  /// |v><v| for a unit vector v.
  static DensityOperator pure(const Vector& v, const Tolerances& tol = {}) {
    if (std::abs(v.norm() - 1.0) > 1e-12) throw StateError("pure state vector must have unit norm");
    return DensityOperator(projector(v), tol);
  }

  static DensityOperator maximally_mixed(std::size_t d) {
    return DensityOperator(Operator::Identity(d, d) / static_cast<double>(d));
  }

  const Operator& matrix() const { return rho_; }
  std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }

 private:
  Operator rho_;
};

/// d x d matrix of independent complex standard normals.
inline Operator random_gaussian_matrix(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Operator g(d, d);
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.cols(); ++c) g(r, c) = Complex(normal(rng), normal(rng));
  }
  return g;
}

/// G G^* / tr(G G^*) with complex Gaussian G: full rank almost surely.
inline DensityOperator random_state(std::size_t d, std::mt19937_64& rng) {
  const Operator g = random_gaussian_matrix(d, rng);
  Operator rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(hermitian_part(rho));
}

}  // namespace qjoint
