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

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using namespace qjoint;
using namespace qjoint::cli;

struct Common {
  std::vector<std::size_t> dims{};
  std::optional<double> tol;
  std::string out;
};

Tolerances tolerances(const Common& c) {
  Tolerances tol = Tolerances::from_env();
  if (c.tol) {
    if (!(*c.tol > 0.0)) throw InvalidParameterError("--tol must be positive");
    tol.eq = *c.tol;
  }
  return tol;
}

std::size_t single_dim(const Common& c, std::size_t fallback) {
  if (c.dims.empty()) return fallback;
  if (c.dims.size() != 1) throw InvalidParameterError("this command takes a single --dims value");
  return c.dims.front();
}

void add_common(CLI::App* sub, Common& c, bool many_dims) {
  sub->add_option("--dims,-d", c.dims, many_dims ? "Hilbert space dimensions" : "Hilbert space dimension")
      ->expected(1, many_dims ? 64 : 1);
  sub->add_option("--tol", c.tol, "operator equality tolerance (overrides QJOINT_TOL)");
  sub->add_option("--out,-o", c.out, "write the result here instead of stdout");
}

int emit(const Outcome& result, const Common& c) {
  if (c.out.empty()) {
    std::cout << result.output;
    std::cout.flush();
  } else {
    write_file(c.out, result.output);
  }
  if (!result.message.empty()) std::cerr << "qjoint: " << result.message << "\n";
  return result.code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint measurability of conjugate observables on finite Weyl systems"};
  app.require_subcommand(1);

  Common common;
  std::function<Outcome()> run;

  // boundary
  BoundaryOptions bopt;
  auto* boundary = app.add_subcommand("boundary", "tabulate gamma_max(lambda), or classify a (lambda, gamma) grid");
  add_common(boundary, common, true);
  boundary->add_option("--samples,-n", bopt.samples, "grid points on [0, 1]")->capture_default_str();
  boundary->add_flag("--region", bopt.region, "classify every grid point (sufficient-linear / stripe / outside)");
  boundary->callback([&] {
    if (!common.dims.empty()) bopt.dims = common.dims;
    bopt.tol = tolerances(common);
    run = [&] { return cmd_boundary(bopt); };
  });

  // check
  CheckOptions copt;
  auto* check = app.add_subcommand("check", "decide joint measurability of A_lambda and B_gamma");
  add_common(check, common, false);
  check->add_option("--lambda,-l", copt.lambda, "unsharpness of A")->required();
  check->add_option("--gamma,-g", copt.gamma, "unsharpness of B")->required();
  check->add_flag("--assert", copt.assert_joint, "exit 1 unless jointly measurable");
  check->callback([&] {
    copt.d = single_dim(common, 2);
    copt.tol = tolerances(common);
    run = [&] { return cmd_check(copt); };
  });

  // tomography
  TomographyOptions topt;
  std::optional<std::string> state_in, probs_in, probs_out;
  auto* tomo = app.add_subcommand("tomography", "linear-inversion tomography with a covariant joint observable");
  add_common(tomo, common, false);
  tomo->add_option("--lambda,-l", topt.lambda, "unsharpness of the position marginal")->capture_default_str();
  tomo->add_option("--interior", topt.interior, "use an interior IC generator with this gamma");
  tomo->add_option("--state", state_in, "state JSON to measure (default: random state from --seed)");
  tomo->add_option("--probs", probs_in, "reconstruct from this j,k,probability table instead");
  tomo->add_option("--probs-out", probs_out, "write the outcome table as CSV");
  tomo->add_option("--seed", topt.seed, "seed for the random state")->capture_default_str();
  tomo->callback([&] {
    topt.d = single_dim(common, 3);
    topt.tol = tolerances(common);
    topt.state_path = state_in;
    topt.probs_path = probs_in;
    topt.probs_out = probs_out;
    if (state_in && probs_in) throw InvalidParameterError("--state and --probs are exclusive");
    run = [&] { return cmd_tomography(topt); };
  });

  // ic-check
  IcCheckOptions iopt;
  std::optional<std::string> ic_in;
  auto* ic = app.add_subcommand("ic-check", "test informational completeness of a POVM file or a generator");
  add_common(ic, common, false);
  ic->add_option("--in", ic_in, "POVM JSON (span test only)");
  ic->add_option("--lambda,-l", iopt.lambda, "unsharpness of the position marginal")->capture_default_str();
  ic->add_option("--interior,--gamma", iopt.interior, "interior IC construction with this gamma");
  ic->add_flag("--assert", iopt.assert_ic, "exit 1 unless informationally complete");
  ic->callback([&] {
    iopt.d = single_dim(common, 3);
    iopt.tol = tolerances(common);
    iopt.in = ic_in;
    run = [&] { return cmd_ic_check(iopt); };
  });

  // validate
  ValidateOptions vopt;
  auto* val = app.add_subcommand("validate", "check positivity, completeness and covariance of a POVM file");
  add_common(val, common, false);
  val->add_option("--in,input", vopt.in, "POVM JSON")->required();
  val->callback([&] {
    vopt.tol = tolerances(common);
    run = [&] { return cmd_validate(vopt); };
  });

  // export
  ExportOptions eopt;
  auto* exp = app.add_subcommand("export", "write the extremal (or an interior IC) joint observable as POVM JSON");
  add_common(exp, common, false);
  exp->add_option("--lambda,-l", eopt.lambda, "unsharpness of the position marginal")->capture_default_str();
  exp->add_option("--interior,--gamma", eopt.interior, "interior IC construction with this gamma");
  exp->callback([&] {
    eopt.d = single_dim(common, 3);
    run = [&] { return cmd_export(eopt); };
  });

  // sic-demo
  SicOptions sopt;
  auto* sic = app.add_subcommand("sic-demo", "qubit sequential measurement and its SIC point");
  add_common(sic, common, false);
  sic->add_option("--lambda,-l", sopt.lambda, "unsharpness of the first measurement")->capture_default_str();
  sic->add_option("--theta", sopt.theta, "rotation angle in [0, pi/2)")->capture_default_str();
  sic->add_flag("--assert", sopt.assert_sic, "exit 1 unless the effects form a SIC");
  sic->callback([&] {
    sopt.tol = tolerances(common);
    run = [&] { return cmd_sic_demo(sopt); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    std::cerr << "qjoint: " << e.what() << "\n";
    return exit_code_for(e);
  }

  try {
    return emit(run(), common);
  } catch (const Error& e) {
    std::cerr << "qjoint: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "qjoint: " << e.what() << "\n";
    return kDomainFailure;
  }
}
