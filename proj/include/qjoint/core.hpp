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
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qjoint {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Group elements are mixed-radix integers 0..d-1, first factor most significant.
using Element = std::size_t;

/// Numerical thresholds shared by every check in the library.
struct Tolerances {
  double eq = 1e-10;        // entrywise operator equality
  double psd = 1e-9;        // eigenvalue floor for positivity
  double boundary = 1e-9;   // joint-measurability boundary slack
  double rank = 1e-8;       // relative singular-value cutoff
  double ic = 1e-8;         // |tr(T U_x V_y)| cutoff

  /// Defaults, with `eq` replaced by $QJOINT_TOL when it parses as a positive number.
  static Tolerances from_env() {
    Tolerances tol;
    if (const char* raw = std::getenv("QJOINT_TOL")) {
      char* end = nullptr;
      double value = std::strtod(raw, &end);
      if (end != raw && *end == '\0' && value > 0.0) tol.eq = value;
    }
    return tol;
  }
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGroupError : public Error {
 public:
  using Error::Error;
};
class InvalidParameterError : public Error {
 public:
  using Error::Error;
};
class IndexError : public Error {
 public:
  using Error::Error;
};
class ShapeError : public Error {
 public:
  using Error::Error;
};
class StateError : public Error {
 public:
  using Error::Error;
};
class SqrtError : public Error {
 public:
  using Error::Error;
};
class PreconditionError : public Error {
 public:
  using Error::Error;
};
class InputError : public Error {
 public:
  using Error::Error;
};
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Raised when a requested point is not strictly inside the jointly measurable region.
class OutOfInteriorError : public Error {
 public:
  using Error::Error;
};

/// A covariant phase-space generator with a vanishing Weyl coefficient at (x, y).
class NotInformationallyCompleteError : public Error {
 public:
  NotInformationallyCompleteError(Element x, Element y, double magnitude)
      : Error("generator is not informationally complete: |tr(T U_x V_y)| = " +
              std::to_string(magnitude) + " at (x, y) = (" + std::to_string(x) + ", " +
              std::to_string(y) + ")"),
        x_(x),
        y_(y) {}
  Element x() const { return x_; }
  Element y() const { return y_; }

 private:
  Element x_;
  Element y_;
};

inline void require_unit_interval(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidParameterError(std::string(name) + " must lie in [0, 1], got " +
                                std::to_string(value));
  }
}

inline double max_abs(const Operator& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const Operator& a, const Operator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("operator shapes differ");
  }
  return max_abs(a - b);
}

inline Operator projector(const Vector& v) { return v * v.adjoint(); }

/// tr(AB) without forming the product.
inline Complex trace_product(const Operator& a, const Operator& b) {
  return a.transpose().cwiseProduct(b).sum();
}

inline Operator hermitian_part(const Operator& a) { return (a + a.adjoint()) / 2.0; }

inline double min_eigenvalue(const Operator& a) {
  Eigen::SelfAdjointEigenSolver<Operator> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

/// Largest |eigenvalue| of the Hermitian part.
inline double hermitian_norm(const Operator& a) {
  Eigen::SelfAdjointEigenSolver<Operator> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// Principal square root of a positive operator. Eigenvalues in [-psd_tol, 0) are
/// clamped to zero; anything more negative is an error.
inline Operator psd_sqrt(const Operator& a, double psd_tol = 1e-9) {
  Eigen::SelfAdjointEigenSolver<Operator> solver(hermitian_part(a));
  Eigen::VectorXd values = solver.eigenvalues();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) < -psd_tol) {
      throw SqrtError("operator is not positive semidefinite (eigenvalue " +
                      std::to_string(values(i)) + ")");
    }
    values(i) = std::sqrt(std::max(values(i), 0.0));
  }
  const Operator& basis = solver.eigenvectors();
  return basis * values.cast<Complex>().asDiagonal() * basis.adjoint();
}

/// Numerical rank with a cutoff relative to the largest singular value.
inline std::size_t numerical_rank(const Operator& m, double relative_tol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Operator> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cutoff = relative_tol * s(0);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++rank;
  }
  return rank;
}

}  // namespace qjoint
