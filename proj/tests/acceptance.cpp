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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qjoint/qjoint.hpp"

namespace {

using namespace qjoint;

struct Result {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

Povm a_lambda(double lambda, const WeylSystem& ws) {
  return smear(conjugate_pair(ws).position, depolarizing_dist(lambda, ws.group()));
}
Povm b_gamma(double gamma, const WeylSystem& ws) {
  return smear(conjugate_pair(ws).momentum, depolarizing_dist(gamma, ws.group()));
}

double marginal_error(const Povm& joint, double lambda, double gamma, const WeylSystem& ws) {
  const auto m = marginals(joint);
  return std::max(max_effect_difference(m.first, a_lambda(lambda, ws)),
                  max_effect_difference(m.second, b_gamma(gamma, ws)));
}

Povm sine_biased_table() {
  const WeylSystem ws(4);
  std::vector<Operator> effects;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      effects.push_back((1.0 - std::sin(2 * std::numbers::pi * i * j / 4.0)) / 16.0 * ws.identity());
    }
  }
  return Povm(ws.group(), OutcomeSpace::kPhaseSpace, effects);
}

Result boundary_formula() {
  double worst = 0.0, qubit = 0.0;
  bool endpoints = true;
  for (std::size_t d = 2; d <= 8; ++d) {
    const double dd = static_cast<double>(d);
    for (int i = 0; i <= 100; ++i) {
      const double l = i / 100.0;
      const double expect = ((dd - 2) * (1 - l) + 2 * std::sqrt((1 - dd) * l * l + (dd - 2) * l + 1)) / dd;
      const double got = gamma_max_value(l, d);
      worst = std::max(worst, std::abs(got - expect));
      worst = std::max(worst, std::abs(got - oracle::gamma_max_bisect(l, d)) > 1e-9 ? 1.0 : 0.0);
      if (d == 2) qubit = std::max(qubit, std::abs(got - std::sqrt(1 - l * l)));
    }
    endpoints = endpoints && gamma_max_value(0.0, d) == 1.0 && gamma_max_value(1.0, d) == 0.0;
  }
  return {worst <= 1e-12 && qubit <= 1e-12 && endpoints,
          "closed-form dev " + sci(worst) + ", qubit dev " + sci(qubit) + (endpoints ? ", endpoints exact" : ", endpoints off")};
}

Result fixed_point() {
  double worst = 0.0;
  for (std::size_t d : {2u, 3u, 4u, 9u}) {
    const double dd = static_cast<double>(d);
    const double x = (dd + std::sqrt(dd) - 2) / (2 * (dd - 1));
    worst = std::max(worst, std::abs(gamma_max_value(x, d) - x));
    worst = std::max(worst, std::abs(equal_unsharpness_point(d) - x));
  }
  worst = std::max(worst, std::abs(gamma_max_value(2.0 / 3.0, 4) - 2.0 / 3.0));
  worst = std::max(worst, std::abs(gamma_max_value(5.0 / 8.0, 9) - 5.0 / 8.0));
  return {worst <= 1e-12, "max dev " + sci(worst)};
}

Result criterion_equivalence() {
  std::mt19937_64 rng(2024);
  int agree = 0, total = 0, ic = 0;
  for (std::size_t d = 2; d <= 6; ++d) {
    const WeylSystem ws(d);
    for (int t = 0; t < 30; ++t) {
      const ICReport r = ic_report(random_state(d, rng), ws);
      ++total;
      agree += r.is_ic_by_span == r.is_ic_by_criterion;
      ic += r.is_ic_by_span;
    }
  }
  return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " agree (" + std::to_string(ic) + " IC)"};
}

Result parity() {
  int bad = 0, cases = 0;
  for (std::size_t d = 2; d <= 9; ++d) {
    const WeylSystem ws(d);
    for (int i = 1; i <= 9; ++i) {
      const ICReport r = ic_by_criterion(DensityOperator::pure(gamma_max(i / 10.0, d).chi), ws);
      ++cases;
      bool ok = r.is_ic_by_criterion == (d % 2 == 1);
      for (Element x = 0; x < d; ++x) {
        for (Element y = 0; y < d; ++y) {
          const bool vanishes = std::abs(r.weyl_coefficients[x * d + y]) <= 1e-8;
          ok = ok && vanishes == ((2 * x * y) % (2 * d) == d);
        }
      }
      bad += !ok;
    }
  }
  return {bad == 0, std::to_string(cases - bad) + "/" + std::to_string(cases) + " (d, lambda) cases"};
}

Result interior_construction() {
  double worst = 0.0, min_ratio = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (std::size_t d : {3u, 4u, 5u, 6u}) {
    const WeylSystem ws(d);
    for (double l : {0.3, 0.6}) {
      for (double f : {0.5, 0.9}) {
        const double g = f * gamma_max_value(l, d);
        const ICConstruction c = construct_ic_joint(l, g, ws);
        worst = std::max(worst, marginal_error(c.observable(ws).povm(), l, g, ws));
        const ICReport r = ic_report(*c.generator, ws);
        const double margin = 1e-6 * (c.branch == ICBranch::kEven ? c.kappa : c.tau);
        min_ratio = std::min(min_ratio, r.min_abs_coefficient / margin);
        ok = ok && r.min_abs_coefficient > margin && r.is_ic_by_span;
      }
    }
  }
  return {ok && worst <= 1e-10, "marginal dev " + sci(worst) + ", min |coeff| / margin " + sci(min_ratio)};
}

Result reconstruction() {
  std::mt19937_64 rng(77);
  double expansion = 0.0, tomo = 0.0;
  int generators = 0;
  for (long long d = 2; d <= 7; ++d) {
    const WeylSystem ws(static_cast<std::size_t>(d));
    for (int t = 0; t < 50; ++t) {
      const Operator a = oracle::random_matrix(d, rng);
      expansion = std::max(expansion, max_abs_diff(weyl_coefficients(a, ws).reconstruct(), a));
    }
    std::vector<DensityOperator> gens{random_state(d, rng)};
    if (d % 2 == 1) gens.push_back(DensityOperator::pure(gamma_max(0.5, d).chi));
    gens.push_back(*construct_ic_joint(0.5, 0.7 * gamma_max_value(0.5, d), ws).generator);
    for (const DensityOperator& t : gens) {
      if (!ic_by_criterion(t, ws).is_ic_by_criterion) continue;
      ++generators;
      const Povm c = covariant_observable(t, ws).povm();
      for (int s = 0; s < 20; ++s) {
        const Operator rho = random_state(d, rng).matrix();
        tomo = std::max(tomo, max_abs_diff(tomography_reconstruct(outcome_distribution(rho, c), t, ws), rho));
      }
    }
  }
  return {expansion <= 1e-12 && tomo <= 1e-10,
          "expansion dev " + sci(expansion) + ", tomography dev " + sci(tomo) + " over " + std::to_string(generators) +
              " generators"};
}

Result lueders_extremal() {
  double worst = 0.0;
  for (std::size_t d = 2; d <= 6; ++d) {
    const WeylSystem ws(d);
    for (double l : {0.2, 0.5, 0.8}) {
      const Povm c = sequential_observable(lueders_instrument(a_lambda(l, ws)), conjugate_pair(ws).momentum);
      worst = std::max(worst, max_effect_difference(c, extremal_joint_observable(l, ws).povm()));
    }
  }
  return {worst <= 1e-12, "max dev " + sci(worst)};
}

Result qubit_sic() {
  const Povm c = qubit_rotated_sequential({1.0 / std::sqrt(3.0), std::numbers::pi / 4});
  double lo = 1.0, hi = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      const double v = trace_product(c.effects()[i], c.effects()[j]).real();
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const bool ic = ic_by_span(c).is_ic_by_span;
  return {hi - lo <= 1e-12 && std::abs(lo - 1.0 / 12.0) <= 1e-12 && ic,
          "overlap spread " + sci(hi - lo) + ", value " + io::format_double(lo) + (ic ? ", IC" : ", not IC")};
}

Result covariantization() {
  const WeylSystem ws4(4);
  const auto flat = covariantize(sine_biased_table(), ws4);
  double dev1 = 0.0;
  for (const Operator& e : flat.povm().effects()) dev1 = std::max(dev1, max_abs_diff(e, ws4.identity() / 16.0));

  // marginals A_{0.5;delta}, B_{0.3}, d = 3
  const WeylSystem ws3(3);
  const auto pair = conjugate_pair(ws3);
  const Povm b06 = b_gamma(0.6, ws3);
  const ProbDist delta = ProbDist::point(ws3.group());
  std::vector<Operator> effects;
  for (Element j = 0; j < 3; ++j) {
    for (Element k = 0; k < 3; ++k) effects.push_back(0.5 * pair.position(j) / 3.0 + 0.5 * delta(j) * b06(k));
  }
  const double dev2 = marginal_error(covariantize(Povm(ws3.group(), OutcomeSpace::kPhaseSpace, effects), ws3).povm(),
                                     0.5, 0.3, ws3);
  return {dev1 <= 1e-12 && dev2 <= 1e-10, "flat dev " + sci(dev1) + ", debiased marginal dev " + sci(dev2)};
}

Result rank_bound() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int tested = 0, held = 0;
  auto test = [&](const Povm& joint) {
    ++tested;
    held += trivial_marginal_rank_bound(joint).holds;
  };
  for (std::size_t d = 2; d <= 4; ++d) {
    const WeylSystem ws(d);
    test(Povm(ws.group(), OutcomeSpace::kPhaseSpace, std::vector<Operator>(d * d, ws.identity() / double(d * d))));
    test(covariant_observable(DensityOperator::pure(ws.fourier_vector(0)), ws).povm());
    test(covariant_observable(DensityOperator::pure(ws.basis_vector(0)), ws).povm());
    std::vector<DensityOperator> xi;
    for (Element j = 0; j < d; ++j) xi.push_back(random_state(d, rng));
    test(partial_ensemble_sequential(0.0, xi, ws));
    for (int t = 0; t < 10; ++t) {
      Operator diag_f = Operator::Zero(d, d), diag_p = Operator::Zero(d, d);
      double s1 = 0, s2 = 0;
      std::vector<double> w1(d), w2(d);
      for (Element k = 0; k < d; ++k) {
        s1 += (w1[k] = u(rng));
        s2 += (w2[k] = u(rng));
      }
      for (Element k = 0; k < d; ++k) {
        diag_f += (w1[k] / s1) * projector(ws.fourier_vector(k));
        diag_p += (w2[k] / s2) * projector(ws.basis_vector(k));
      }
      test(covariant_observable(DensityOperator(diag_f), ws).povm());
      test(covariant_observable(DensityOperator(diag_p), ws).povm());
    }
  }
  test(sine_biased_table());
  return {held == tested, std::to_string(held) + "/" + std::to_string(tested) + " joint observables within 1 + d(d-1)"};
}

Result gauss() {
  double worst = 0.0;
  for (std::size_t p : {3u, 5u, 7u, 11u}) {
    for (long long a = 1; a < static_cast<long long>(p); ++a) {
      Complex brute = 0.0;
      for (long long x = 0; x < static_cast<long long>(p); ++x) brute += oracle::omega_pow(a * x * x, p);
      brute /= std::sqrt(static_cast<double>(p));
      worst = std::max(worst, std::abs(brute - gauss_sum_closed_form(p, a)));
      worst = std::max(worst, std::abs(gauss_sum(p, a) - gauss_sum_closed_form(p, a)));
    }
  }
  Operator f(4, 4);
  f << 1, 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1, -1, -1, 1;
  f /= 2.0;
  const double fdev = max_abs_diff(WeylSystem(FiniteAbelianGroup({2, 2})).fourier(), f);
  return {worst <= 1e-10 && fdev == 0.0, "Gauss dev " + sci(worst) + ", Z2xZ2 Fourier dev " + sci(fdev)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria{
      {"boundary formula", boundary_formula},
      {"equal-unsharpness fixed point", fixed_point},
      {"IC criterion equivalence", criterion_equivalence},
      {"IC parity at the boundary", parity},
      {"interior IC construction", interior_construction},
      {"reconstruction and tomography", reconstruction},
      {"Lueders instrument gives the extremal joint", lueders_extremal},
      {"qubit SIC point", qubit_sic},
      {"covariantization", covariantization},
      {"trivial-marginal span bound", rank_bound},
      {"Gauss sums and Z2xZ2 Fourier matrix", gauss},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failures += !r.pass;
    std::printf("%s %2zu %s: %s\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, r.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
