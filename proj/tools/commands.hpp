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
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qjoint/qjoint.hpp"

namespace qjoint::cli {

using io::json;

enum ExitCode : int { kOk = 0, kDomainFailure = 1, kUsage = 2 };

/// What a subcommand produced: text for stdout or --out, and the exit code.
struct Outcome {
  int code = kOk;
  std::string output;
  std::string message;  // for stderr
};

inline std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

inline void require_dim(std::size_t d) {
  if (d < 2) throw InvalidParameterError("dimension must be at least 2, got " + std::to_string(d));
}

inline std::vector<double> unit_grid(std::size_t samples) {
  if (samples < 2) throw InvalidParameterError("--samples must be at least 2");
  std::vector<double> grid(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    grid[i] = static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  grid.back() = 1.0;
  return grid;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) throw InputError("cannot write " + path);
}

// ---- boundary ----

struct BoundaryOptions {
  std::vector<std::size_t> dims{2};
  std::size_t samples = 101;
  bool region = false;
  Tolerances tol;
};

inline const char* region_name(const LinearCriteria& lin) {
  if (lin.sufficient) return "sufficient-linear";
  if (lin.necessary) return "stripe";
  return "outside";
}

inline Outcome cmd_boundary(const BoundaryOptions& opt) {
  const std::vector<double> grid = unit_grid(opt.samples);
  std::ostringstream out;
  if (!opt.region) {
    out << "d,lambda,gamma_max\n";
    for (std::size_t d : opt.dims) {
      require_dim(d);
      for (double lambda : grid) {
        out << d << ',' << io::format_double(lambda) << ',' << io::format_double(gamma_max_value(lambda, d)) << '\n';
      }
    }
    return {kOk, out.str(), {}};
  }
  out << "d,lambda,gamma,region,jointly_measurable\n";
  for (std::size_t d : opt.dims) {
    require_dim(d);
    const WeylSystem ws(d);
    for (double lambda : grid) {
      for (double gamma : grid) {
        const LinearCriteria lin = linear_criteria(lambda, gamma, d);
        const EllipseChord chord = ellipse_chord(lambda, d);
        const bool jm = lin.sufficient || (chord.real && gamma >= chord.lower - opt.tol.boundary &&
                                           gamma <= chord.upper + opt.tol.boundary);
        out << d << ',' << io::format_double(lambda) << ',' << io::format_double(gamma) << ','
            << region_name(lin) << ',' << (jm ? "true" : "false") << '\n';
      }
    }
  }
  return {kOk, out.str(), {}};
}

// ---- check ----

struct CheckOptions {
  std::size_t d = 2;
  double lambda = 0.0;
  double gamma = 0.0;
  bool assert_joint = false;
  Tolerances tol;
};

inline Outcome cmd_check(const CheckOptions& opt) {
  require_dim(opt.d);
  const WeylSystem ws(opt.d);
  const JointnessVerdict v = is_jointly_measurable(opt.lambda, opt.gamma, ws, opt.tol);
  const LinearCriteria lin = linear_criteria(opt.lambda, opt.gamma, opt.d);
  json doc;
  doc["d"] = opt.d;
  doc["lambda"] = io::round_significant(opt.lambda);
  doc["gamma"] = io::round_significant(opt.gamma);
  doc["jointly_measurable"] = v.jointly_measurable;
  doc["gamma_max"] = io::round_significant(v.gamma_max);
  doc["linear_sufficient"] = lin.sufficient;
  doc["linear_necessary"] = lin.necessary;
  doc["ellipse_value"] = io::round_significant(v.ellipse_value);
  if (v.certificate) {
    json cert = io::state_to_json(v.certificate->generator.matrix(), ws.group());
    cert["tau"] = io::round_significant(v.certificate->tau);
    cert["lambda0"] = io::round_significant(v.certificate->lambda0);
    cert["gamma0"] = io::round_significant(v.certificate->gamma0);
    doc["certificate_state"] = std::move(cert);
  } else {
    doc["certificate_state"] = nullptr;
  }
  const int code = (opt.assert_joint && !v.jointly_measurable) ? kDomainFailure : kOk;
  return {code, dump(doc), code == kOk ? "" : "not jointly measurable"};
}

// ---- tomography ----

struct TomographyOptions {
  std::size_t d = 3;
  double lambda = 0.5;
  std::optional<double> interior;  // gamma for an interior IC generator
  std::optional<std::string> state_path;
  std::optional<std::string> probs_path;
  std::optional<std::string> probs_out;
  std::uint64_t seed = 1;
  double max_error = 1e-8;
  Tolerances tol;
};

/// Generator used for tomography: the boundary state for odd d, or an interior
/// IC construction when requested.
inline DensityOperator tomography_generator(const TomographyOptions& opt, const WeylSystem& ws) {
  if (opt.interior) return *construct_ic_joint(opt.lambda, *opt.interior, ws).generator;
  require_unit_interval(opt.lambda, "lambda");
  DensityOperator boundary = DensityOperator::pure(gamma_max(opt.lambda, opt.d).chi);
  const ICReport ic = ic_by_criterion(boundary, ws, opt.tol);
  if (!ic.is_ic_by_criterion) {
    throw PreconditionError("not informationally complete, use --interior GAMMA: the boundary generator has "
                            "tr(T U_x V_y) = 0 at (x, y) = (" + std::to_string(ic.min_x) + ", " +
                            std::to_string(ic.min_y) + ")");
  }
  return boundary;
}

inline Outcome cmd_tomography(const TomographyOptions& opt) {
  require_dim(opt.d);
  const WeylSystem ws(opt.d);
  const DensityOperator generator = tomography_generator(opt, ws);
  const ICReport ic = ic_by_criterion(generator, ws, opt.tol);
  if (!ic.is_ic_by_criterion) {
    throw NotInformationallyCompleteError(ic.min_x, ic.min_y, ic.min_abs_coefficient);
  }
  const Povm joint = covariant_observable(generator, ws).povm();

  std::optional<Operator> truth;
  std::vector<double> probs;
  if (opt.probs_path) {
    std::ifstream in(*opt.probs_path);
    if (!in) throw InputError("cannot open " + *opt.probs_path);
    probs = io::read_probabilities(in, opt.d);
  } else {
    if (opt.state_path) {
      io::ParsedState parsed = io::state_from_json(io::parse_json(read_file(*opt.state_path)));
      if (parsed.group.order() != opt.d) throw InputError("state dimension does not match --dims");
      try {
        truth = DensityOperator(parsed.matrix, opt.tol).matrix();
      } catch (const StateError& e) {
        throw InputError(std::string("input is not a valid state: ") + e.what());
      }
    } else {
      std::mt19937_64 rng(opt.seed);
      truth = random_state(opt.d, rng).matrix();
    }
    probs = outcome_distribution(*truth, joint);
  }
  if (opt.probs_out) {
    std::ostringstream csv;
    io::write_probabilities(csv, probs, opt.d);
    write_file(*opt.probs_out, csv.str());
  }

  const Operator estimate = tomography_reconstruct(probs, generator, ws, opt.tol);
  // Consistency of the estimate with the table, and distance to the true state when known.
  double fit = 0.0;
  const std::vector<double> replay = outcome_distribution(estimate, joint);
  for (std::size_t i = 0; i < probs.size(); ++i) fit = std::max(fit, std::abs(replay[i] - probs[i]));
  const double error = truth ? max_abs_diff(estimate, *truth) : fit;

  json doc;
  doc["d"] = opt.d;
  doc["lambda"] = io::round_significant(opt.lambda);
  doc["generator"] = opt.interior ? "interior" : "boundary";
  doc["gamma"] = io::round_significant(opt.interior ? *opt.interior : gamma_max_value(opt.lambda, opt.d));
  doc["min_abs_coefficient"] = io::round_significant(ic.min_abs_coefficient);
  doc["reconstructed"] = io::state_to_json(estimate, ws.group());
  doc["max_error"] = io::round_significant(error);
  doc["table_residual"] = io::round_significant(fit);
  doc["error_reference"] = truth ? "input state" : "outcome table";
  const bool ok = error <= opt.max_error;
  doc["ok"] = ok;
  return {ok ? kOk : kDomainFailure, dump(doc), ok ? "" : "reconstruction error exceeds threshold"};
}

// ---- ic-check ----

struct IcCheckOptions {
  std::optional<std::string> in;  // POVM JSON
  std::size_t d = 3;
  double lambda = 0.5;
  std::optional<double> interior;
  bool assert_ic = false;
  Tolerances tol;
};

inline Outcome cmd_ic_check(const IcCheckOptions& opt) {
  json doc;
  bool ic = false;
  if (opt.in) {
    const Povm povm = io::povm_from_string(read_file(*opt.in));
    const PovmReport valid = validate(povm, opt.tol);
    if (!valid.outcome_count_ok || !valid.shapes_ok) throw InputError("POVM has the wrong number or shape of effects");
    const ICReport span = ic_by_span(povm, opt.tol);
    doc["source"] = "povm";
    doc["d"] = povm.dim();
    doc["outcomes"] = povm.size();
    doc["valid_povm"] = valid.valid();
    doc["span_rank"] = span.span_rank;
    doc["informationally_complete"] = span.is_ic_by_span;
    ic = span.is_ic_by_span;
  } else {
    require_dim(opt.d);
    const WeylSystem ws(opt.d);
    std::optional<DensityOperator> generator;
    if (opt.interior) {
      const ICConstruction c = construct_ic_joint(opt.lambda, *opt.interior, ws);
      generator = *c.generator;
      doc["branch"] = c.branch == ICBranch::kOdd ? "odd" : "even";
      doc["tau"] = io::round_significant(c.tau);
      doc["kappa"] = io::round_significant(c.kappa);
    } else {
      require_unit_interval(opt.lambda, "lambda");
      generator = DensityOperator::pure(gamma_max(opt.lambda, opt.d).chi);
    }
    const ICReport r = ic_report(*generator, ws, opt.tol);
    doc["source"] = opt.interior ? "interior" : "boundary";
    doc["d"] = opt.d;
    doc["lambda"] = io::round_significant(opt.lambda);
    doc["gamma"] = io::round_significant(opt.interior ? *opt.interior : gamma_max_value(opt.lambda, opt.d));
    doc["span_rank"] = r.span_rank;
    doc["ic_by_span"] = r.is_ic_by_span;
    doc["ic_by_criterion"] = r.is_ic_by_criterion;
    doc["min_abs_coefficient"] = io::round_significant(r.min_abs_coefficient);
    doc["min_at"] = {r.min_x, r.min_y};
    json vanishing = json::array();
    for (std::size_t i = 0; i < r.weyl_coefficients.size(); ++i) {
      if (std::abs(r.weyl_coefficients[i]) <= opt.tol.ic) vanishing.push_back({i / opt.d, i % opt.d});
    }
    doc["vanishing"] = std::move(vanishing);
    doc["informationally_complete"] = r.is_ic_by_span && r.is_ic_by_criterion;
    ic = r.is_ic_by_span && r.is_ic_by_criterion;
  }
  const int code = (opt.assert_ic && !ic) ? kDomainFailure : kOk;
  return {code, dump(doc), code == kOk ? "" : "not informationally complete"};
}

// ---- validate ----

struct ValidateOptions {
  std::string in;
  Tolerances tol;
};

inline Outcome cmd_validate(const ValidateOptions& opt) {
  const Povm povm = io::povm_from_string(read_file(opt.in));
  const PovmReport r = validate(povm, opt.tol);
  json doc;
  doc["d"] = povm.dim();
  doc["outcomes"] = povm.size();
  doc["outcome_space"] = povm.space() == OutcomeSpace::kGroup ? "group" : "phase-space";
  doc["outcome_count_ok"] = r.outcome_count_ok;
  doc["shapes_ok"] = r.shapes_ok;
  doc["positive"] = r.positive;
  doc["complete"] = r.complete;
  doc["min_eigenvalue"] = io::round_significant(r.min_eigenvalue);
  doc["max_hermiticity_error"] = io::round_significant(r.max_hermiticity_error);
  doc["completeness_error"] = io::round_significant(r.completeness_error);
  if (r.outcome_count_ok && r.shapes_ok) {
    const CovarianceReport cov = check_covariance(povm, WeylSystem(povm.group()), opt.tol);
    json c;
    if (povm.space() == OutcomeSpace::kGroup) {
      c["u_covariant"] = cov.u_covariant;
      c["v_invariant"] = cov.v_invariant;
      c["u_invariant"] = cov.u_invariant;
      c["v_covariant"] = cov.v_covariant;
    } else {
      c["phase_space_covariant"] = cov.phase_space_covariant;
    }
    doc["covariance"] = std::move(c);
  } else {
    doc["covariance"] = nullptr;
  }
  doc["valid"] = r.valid();
  return {r.valid() ? kOk : kDomainFailure, dump(doc), r.valid() ? "" : "not a valid POVM"};
}

// ---- export ----

struct ExportOptions {
  std::size_t d = 3;
  double lambda = 0.5;
  std::optional<double> interior;
};

/// POVM JSON of the extremal joint observable, or of an interior IC one.
inline Outcome cmd_export(const ExportOptions& opt) {
  require_dim(opt.d);
  const WeylSystem ws(opt.d);
  const Povm povm = opt.interior ? construct_ic_joint(opt.lambda, *opt.interior, ws).observable(ws).povm()
                                 : extremal_joint_observable(opt.lambda, ws).povm();
  return {kOk, dump(io::povm_to_json(povm)), {}};
}

// ---- sic-demo ----

struct SicOptions {
  double lambda = 1.0 / std::numbers::sqrt3;
  double theta = std::numbers::pi / 4.0;
  bool assert_sic = false;
  Tolerances tol;
};

inline Outcome cmd_sic_demo(const SicOptions& opt) {
  const QubitSequentialConfig cfg{opt.lambda, opt.theta};
  const Povm c = qubit_rotated_sequential(cfg);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  json overlaps = json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double v = trace_product(c.effects()[i], c.effects()[j]).real();
      row.push_back(io::round_significant(v));
      if (i != j) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    overlaps.push_back(std::move(row));
  }
  const ICReport span = ic_by_span(c, opt.tol);
  const double spread = hi - lo;
  json doc;
  doc["lambda"] = io::round_significant(opt.lambda);
  doc["theta"] = io::round_significant(opt.theta);
  doc["gamma"] = io::round_significant(std::cos(opt.theta) * std::sqrt(1.0 - opt.lambda * opt.lambda));
  doc["overlaps"] = std::move(overlaps);
  doc["min_offdiagonal_overlap"] = io::round_significant(lo);
  doc["max_offdiagonal_overlap"] = io::round_significant(hi);
  doc["span_rank"] = span.span_rank;
  doc["informationally_complete"] = span.is_ic_by_span;
  const bool sic = spread <= 1e-12 && span.is_ic_by_span;
  doc["sic"] = sic;
  doc["povm"] = io::povm_to_json(c);
  const int code = (opt.assert_sic && !sic) ? kDomainFailure : kOk;
  return {code, dump(doc), code == kOk ? "" : "not a SIC"};
}

/// Maps library errors onto exit codes: bad arguments and unreadable input are
/// usage errors, anything else is a domain failure.
inline int exit_code_for(const Error& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const InvalidParameterError*>(&e) ||
      dynamic_cast<const InvalidGroupError*>(&e) || dynamic_cast<const InputError*>(&e)) {
    return kUsage;
  }
  return kDomainFailure;
}

}  // namespace qjoint::cli
