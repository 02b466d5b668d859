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

// Reference constructions built straight from the definitions with dense
// products, kept independent of the table-driven code in the library.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using M = Eigen::MatrixXcd;
using V = Eigen::VectorXcd;

inline C omega_pow(long long k, long long d) {
  return std::exp(C(0.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(d)));
}

/// U_x phi_k = phi_{k+x} on Z_d.
inline M shift(long long x, long long d) {
  M u = M::Zero(d, d);
  for (long long k = 0; k < d; ++k) u(((k + x) % d + d) % d, k) = 1.0;
  return u;
}

/// V_y phi_k = omega^{yk} phi_k on Z_d.
inline M phase(long long y, long long d) {
  M v = M::Zero(d, d);
  for (long long k = 0; k < d; ++k) v(k, k) = omega_pow(y * k, d);
  return v;
}

inline M weyl(long long x, long long y, long long d) { return shift(x, d) * phase(y, d); }

/// F_{hk} = omega^{-hk} / sqrt(d).
inline M fourier(long long d) {
  M f(d, d);
  for (long long h = 0; h < d; ++h) {
    for (long long k = 0; k < d; ++k) f(h, k) = omega_pow(-h * k, d) / std::sqrt(static_cast<double>(d));
  }
  return f;
}

inline V phi(long long j, long long d) {
  V v = V::Zero(d);
  v(j) = 1.0;
  return v;
}

/// psi_k = F^* phi_k, so <phi_j|psi_k> = omega^{jk}/sqrt(d).
inline V psi(long long k, long long d) { return fourier(d).adjoint() * phi(k, d); }

inline M proj(const V& v) { return v * v.adjoint(); }

inline M a_lambda(double lambda, long long j, long long d) {
  return lambda * proj(phi(j, d)) + (1.0 - lambda) / static_cast<double>(d) * M::Identity(d, d);
}

inline M b_gamma(double gamma, long long k, long long d) {
  return gamma * proj(psi(k, d)) + (1.0 - gamma) / static_cast<double>(d) * M::Identity(d, d);
}

/// C_T(j,k) = (1/d) U_j V_k T V_k^* U_j^*.
inline M covariant_effect(const M& t, long long j, long long k, long long d) {
  const M w = weyl(j, k, d);
  return w * t * w.adjoint() / static_cast<double>(d);
}

/// Closed-form boundary by brute force: largest gamma on a bisection of the ellipse test.
inline double gamma_max_bisect(double lambda, long long d) {
  const double c = 2.0 * static_cast<double>(d - 2) / static_cast<double>(d);
  auto inside = [&](double g) {
    // ellipse - 1 written with u = 1 - lambda factored out; the plain form
    // cancels to sqrt(eps) resolution at the tangent point lambda = 1.
    const double u = 1.0 - lambda;
    return g + lambda <= 1.0 || g * g + u * (c * (1.0 - g) - 1.0 - lambda) <= 0.0;
  };
  double lo = 0.0, hi = 1.0;
  if (inside(1.0)) return 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  return lo;
}

inline double max_abs(const M& a) { return a.cwiseAbs().maxCoeff(); }

inline M random_matrix(long long d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  M a(d, d);
  for (long long r = 0; r < d; ++r) {
    for (long long c = 0; c < d; ++c) a(r, c) = C(n(rng), n(rng));
  }
  return a;
}

inline M random_density(long long d, std::mt19937_64& rng) {
  const M g = random_matrix(d, rng);
  M rho = g * g.adjoint();
  return rho / rho.trace().real();
}

/// Rank of the complex span of the effects, relative singular-value cutoff.
inline long long span_rank(const std::vector<M>& effects, double tol) {
  const long long d = effects.front().rows();
  M rows(static_cast<long long>(effects.size()), d * d);
  for (std::size_t i = 0; i < effects.size(); ++i) {
    for (long long r = 0; r < d; ++r) {
      for (long long c = 0; c < d; ++c) rows(static_cast<long long>(i), r * d + c) = effects[i](r, c);
    }
  }
  Eigen::JacobiSVD<M> svd(rows);
  const auto s = svd.singularValues();
  long long rank = 0;
  for (long long i = 0; i < s.size(); ++i) {
    if (s(i) > tol * s(0)) ++rank;
  }
  return rank;
}

}  // namespace oracle
