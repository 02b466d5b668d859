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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "commands.hpp"

namespace qjoint::cli {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + QJOINT_CLI_PATH + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("qjoint_cli_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

json parse(const std::string& text) { return json::parse(text); }

TEST(Boundary, QubitRows) {
  BoundaryOptions opt;
  opt.dims = {2};
  opt.samples = 3;
  const Outcome o = cmd_boundary(opt);
  EXPECT_EQ(o.code, 0);
  EXPECT_EQ(o.output, "d,lambda,gamma_max\n2,0,1\n2,0.5,0.866025403784\n2,1,0\n");
}

TEST(Boundary, FixedPointRowAtFour) {
  BoundaryOptions opt;
  opt.dims = {4};
  opt.samples = 4;
  EXPECT_NE(cmd_boundary(opt).output.find("\n4,0.666666666667,0.666666666667\n"), std::string::npos);
}

TEST(Boundary, RegionMode) {
  BoundaryOptions opt;
  opt.dims = {10};
  opt.samples = 101;
  opt.region = true;
  const std::string out = cmd_boundary(opt).output;
  EXPECT_EQ(out.substr(0, out.find('\n')), "d,lambda,gamma,region,jointly_measurable");
  EXPECT_NE(out.find("\n10,0.5,0.5,sufficient-linear,true\n"), std::string::npos);
  EXPECT_NE(out.find("\n10,0.61,0.61,stripe,true\n"), std::string::npos);
  EXPECT_NE(out.find("\n10,0.63,0.63,outside,false\n"), std::string::npos);
  EXPECT_NE(out.find(",stripe,false\n"), std::string::npos);
}

TEST(Boundary, RejectsTinyGrid) {
  BoundaryOptions opt;
  opt.samples = 1;
  EXPECT_THROW(cmd_boundary(opt), InvalidParameterError);
  EXPECT_EQ(run("boundary --samples 1").code, 2);
  EXPECT_EQ(run("boundary --dims 1").code, 2);
}

TEST(Check, Examples) {
  auto check = [](std::size_t d, double l, double g) {
    CheckOptions opt;
    opt.d = d;
    opt.lambda = l;
    opt.gamma = g;
    return parse(cmd_check(opt).output);
  };
  json v = check(2, 0.6, 0.8);
  EXPECT_TRUE(v["jointly_measurable"].get<bool>());
  EXPECT_FALSE(v["certificate_state"].is_null());
  EXPECT_NEAR(v["gamma_max"].get<double>(), 0.8, 1e-12);
  v = check(10, 0.65, 0.65);
  EXPECT_FALSE(v["jointly_measurable"].get<bool>());
  EXPECT_FALSE(v["linear_necessary"].get<bool>());
  EXPECT_TRUE(v["certificate_state"].is_null());
  EXPECT_TRUE(check(3, 0.0, 1.0)["jointly_measurable"].get<bool>());
}

TEST(Check, ExitCodes) {
  EXPECT_EQ(run("check --dims 2 --lambda 0.6 --gamma 0.8 --assert").code, 0);
  EXPECT_EQ(run("check --dims 10 --lambda 0.65 --gamma 0.65").code, 0);
  EXPECT_EQ(run("check --dims 10 --lambda 0.65 --gamma 0.65 --assert").code, 1);
  EXPECT_EQ(run("check --dims 2 --lambda 1.5 --gamma 0.1").code, 2);
  EXPECT_EQ(run("check --dims 2 --lambda 0.5").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST(Tomography, MaximallyMixedState) {
  TempDir tmp;
  const std::string state = tmp.file("mixed.json");
  write_file(state, io::state_to_json(Operator::Identity(3, 3) / 3.0, FiniteAbelianGroup::cyclic(3)).dump());
  TomographyOptions opt;
  opt.d = 3;
  opt.lambda = 0.5;
  opt.state_path = state;
  const Outcome o = cmd_tomography(opt);
  EXPECT_EQ(o.code, 0);
  EXPECT_LT(parse(o.output)["max_error"].get<double>(), 1e-12);
}

TEST(Tomography, EvenBoundaryIsRefused) {
  TomographyOptions opt;
  opt.d = 2;
  opt.lambda = 0.5;
  try {
    cmd_tomography(opt);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("not informationally complete, use --interior"), std::string::npos);
  }
  EXPECT_EQ(run("tomography --dims 2 --lambda 0.5").code, 1);
}

TEST(Tomography, InteriorEvenDimension) {
  TomographyOptions opt;
  opt.d = 4;
  opt.lambda = 0.4;
  opt.interior = 0.5;
  const Outcome o = cmd_tomography(opt);
  EXPECT_EQ(o.code, 0);
  EXPECT_LT(parse(o.output)["max_error"].get<double>(), 1e-10);
  EXPECT_EQ(run("tomography --dims 4 --lambda 0.4 --interior 0.5").code, 0);
  EXPECT_EQ(run("tomography --dims 4 --lambda 0.4 --interior 0.99").code, 1);
}

TEST(Tomography, ProbabilityTableRoundTrip) {
  TempDir tmp;
  const std::string csv = tmp.file("p.csv");
  const CliRun first = run("tomography --dims 5 --lambda 0.3 --seed 9 --probs-out " + csv);
  ASSERT_EQ(first.code, 0);
  const CliRun second = run("tomography --dims 5 --lambda 0.3 --probs " + csv);
  ASSERT_EQ(second.code, 0);
  const json a = parse(first.out), b = parse(second.out);
  // 12-digit table: the estimate agrees to about that precision
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 5; ++c) {
      EXPECT_NEAR(a["reconstructed"]["re"][r][c].get<double>(), b["reconstructed"]["re"][r][c].get<double>(), 1e-9);
    }
  }
  write_file(csv, "j,k,probability\n0,0,1\n");
  EXPECT_EQ(run("tomography --dims 5 --lambda 0.3 --probs " + csv).code, 2);
}

TEST(Validate, ExportedAndBroken) {
  TempDir tmp;
  const std::string good = tmp.file("good.json");
  ASSERT_EQ(run("export --dims 3 --lambda 0.5 --out " + good).code, 0);
  CliRun r = run("validate --in " + good);
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(parse(r.out)["valid"].get<bool>());
  EXPECT_TRUE(parse(r.out)["covariance"]["phase_space_covariant"].get<bool>());

  json doc = json::parse(read_file(good));
  for (auto& part : {"re", "im"}) {
    for (auto& row : doc["effects"][0][part]) {
      for (auto& v : row) v = v.get<double>() * 1.01;
    }
  }
  const std::string scaled = tmp.file("scaled.json");
  write_file(scaled, doc.dump());
  r = run("validate --in " + scaled);
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(parse(r.out)["complete"].get<bool>());
  EXPECT_TRUE(parse(r.out)["positive"].get<bool>());
  // loose tolerance from the environment accepts it
  EXPECT_EQ(run("validate --in " + scaled, "QJOINT_TOL=0.1").code, 0);
  EXPECT_EQ(run("validate --tol 0.1 --in " + scaled).code, 0);

  const std::string empty = tmp.file("empty.json");
  write_file(empty, R"({"dim": 3, "factors": [3], "effects": []})");
  r = run("validate --in " + empty);
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(parse(r.out)["valid"].get<bool>());

  const std::string broken = tmp.file("broken.json");
  write_file(broken, "{\"dim\": 3, \"effects\": [");
  EXPECT_EQ(run("validate --in " + broken).code, 2);
  EXPECT_EQ(run("validate --in " + tmp.file("missing.json")).code, 2);
}

TEST(IcCheck, GeneratorsAndFiles) {
  IcCheckOptions opt;
  opt.d = 4;
  opt.lambda = 0.5;
  json v = parse(cmd_ic_check(opt).output);
  EXPECT_FALSE(v["informationally_complete"].get<bool>());
  EXPECT_EQ(v["vanishing"], json::array({{1, 2}, {2, 1}, {2, 3}, {3, 2}}));
  opt.interior = 0.3;
  v = parse(cmd_ic_check(opt).output);
  EXPECT_TRUE(v["informationally_complete"].get<bool>());
  EXPECT_EQ(v["branch"], "even");

  EXPECT_EQ(run("ic-check --dims 3 --lambda 0.5 --assert").code, 0);
  EXPECT_EQ(run("ic-check --dims 2 --lambda 0.5 --assert").code, 1);

  TempDir tmp;
  const std::string sic = tmp.file("sic.json");
  const CliRun demo = run("sic-demo");
  ASSERT_EQ(demo.code, 0);
  write_file(sic, parse(demo.out)["povm"].dump());
  const CliRun r = run("ic-check --in " + sic);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(parse(r.out)["span_rank"], 4);
}

TEST(SicDemo, DefaultIsSic) {
  const json v = parse(cmd_sic_demo({}).output);
  EXPECT_TRUE(v["sic"].get<bool>());
  EXPECT_NEAR(v["min_offdiagonal_overlap"].get<double>(), 1.0 / 12.0, 1e-12);
  EXPECT_EQ(run("sic-demo --assert").code, 0);
  EXPECT_EQ(run("sic-demo --theta 0.3 --assert").code, 1);
  EXPECT_EQ(run("sic-demo --theta 2").code, 2);
}

TEST(Output, DeterministicAndWrittenToFile) {
  TempDir tmp;
  for (const std::string args : {"boundary --dims 2 3 7 --samples 51", "boundary --dims 5 --samples 21 --region",
                                 "check --dims 6 --lambda 0.3 --gamma 0.7", "tomography --dims 5 --seed 42",
                                 "ic-check --dims 6 --lambda 0.2 --interior 0.4", "sic-demo"}) {
    const CliRun a = run(args), b = run(args);
    EXPECT_EQ(a.code, 0) << args;
    EXPECT_EQ(a.out, b.out) << args;
    const std::string path = tmp.file("out.txt");
    ASSERT_EQ(run(args + " --out " + path).code, 0);
    EXPECT_EQ(read_file(path), a.out) << args;
  }
  EXPECT_NE(run("tomography --dims 5 --seed 1").out, run("tomography --dims 5 --seed 2").out);
  EXPECT_EQ(run("boundary --out /nonexistent/dir/x.csv").code, 2);
}

}  // namespace
}  // namespace qjoint::cli
