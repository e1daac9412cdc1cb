// Copyright 2026 The bmlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "bmlab/common.hpp"
#include "bmlab/harness.hpp"
#include "bmlab/rng.hpp"

namespace bmlab {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("bmlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig small_config() {
  return config_from_json(Json::parse(R"({
    "name": "small", "seed": 7,
    "experiments": [
      {"kind": "signset", "params": {"n": 10}},
      {"kind": "ex-packing", "params": {"n": 10, "members": 6}},
      {"kind": "oracles-2d", "params": {"pairs": [["l1", "linf"]], "symmetric": false}},
      {"kind": "separated-family", "params": {"n": 6, "N": 3, "epsilon": 0.9, "delta": 0.2,
                                              "max_samples": 40, "subfamily": 4, "min_size": 4}},
      {"kind": "chains"}
    ]})"));
}

TEST(Config, RoundTrip) {
  ExperimentConfig c = small_config();
  Json j = config_to_json(c);
  ExperimentConfig d = config_from_json(j);
  EXPECT_EQ(config_to_json(d), j);
  EXPECT_EQ(d.experiments.size(), 5u);
  // Defaults are filled in.
  EXPECT_EQ(d.experiments[0].params.at("theta"), 0.5);
}

TEST(Config, RejectsUnknownAndOutOfRange) {
  EXPECT_THROW(config_from_json(Json::parse(R"({"nme": "x"})")), PreconditionError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"experiments": [{"kind": "nope"}]})")), PreconditionError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"experiments": [{"kind": "signset", "params": {"m": 3}}]})")),
               PreconditionError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"experiments": [{"kind": "signset", "params": {"theta": 1.5}}]})")),
               PreconditionError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"experiments": [{"kind": "ex-packing", "params": {"r": 2.5}}]})")),
               PreconditionError);
  try {
    config_from_json(Json::parse(R"({"experiments": [{"kind": "tail", "params": {"samples": 1}}]})"));
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("samples"), std::string::npos);
  }
}

TEST(Config, PresetsValidate) {
  for (const auto& name : preset_names()) EXPECT_NO_THROW(preset(name)) << name;
  EXPECT_THROW(preset("nope"), PreconditionError);
  for (const auto& kind : experiment_kinds()) EXPECT_TRUE(default_params(kind).is_object());
}

TEST(Run, EmptyExperimentList) {
  ExperimentConfig c;
  RunOutcome r = run_experiment(c, false);
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(r.report.at("results").empty());
  EXPECT_EQ(r.report.at("schema"), kReportSchema);
}

TEST(Run, DeterministicApartFromTiming) {
  ExperimentConfig c = small_config();
  RunOutcome a = run_experiment(c, false);
  RunOutcome b = run_experiment(c, false);
  EXPECT_TRUE(a.passed) << a.report.dump(1).substr(0, 2000);
  EXPECT_EQ(strip_timing(a.report).dump(), strip_timing(b.report).dump());
  EXPECT_TRUE(a.report.contains("timing"));
  EXPECT_FALSE(strip_timing(a.report).contains("timing"));
}

TEST(Run, ResultsNameOperationsAndInputs) {
  RunOutcome a = run_experiment(small_config(), false);
  for (const auto& r : a.report.at("results")) {
    EXPECT_FALSE(r.at("operations").empty());
    EXPECT_TRUE(r.at("inputs").is_object());
    EXPECT_TRUE(r.at("seed").is_number_unsigned());
  }
}

TEST(Run, SeedsIndependentOfLaterExperiments) {
  ExperimentConfig c = small_config();
  ExperimentConfig shorter = c;
  shorter.experiments.resize(2);
  RunOutcome a = run_experiment(c, false), b = run_experiment(shorter, false);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(a.report.at("results").at(i).at("result").dump(), b.report.at("results").at(i).at("result").dump());
  }
}

TEST(Run, WritesReportAndCsvToEnvDirectory) {
  fs::path dir = scratch("env");
  ::setenv(kOutputDirEnv, dir.c_str(), 1);
  ExperimentConfig c = small_config();
  c.csv = true;
  RunOutcome r = run_experiment(c);
  ::unsetenv(kOutputDirEnv);
  ASSERT_FALSE(r.files.empty());
  EXPECT_TRUE(fs::exists(dir / "small.report.json"));
  EXPECT_TRUE(fs::exists(dir / "small.ex-packing1.pairs.csv"));
  EXPECT_TRUE(fs::exists(dir / "small.separated-family3.family.csv"));
  std::ifstream csv(dir / "small.ex-packing1.pairs.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "i,j,witness_row,source_norm,target_norm,implied_ratio");
}

TEST(Run, FailedCheckStillReports) {
  Json j = {{"experiments", {{{"kind", "tail"}, {"params", {{"max_frequency", 0.0}, {"samples", 500}}}}}}};
  RunOutcome r = run_experiment(config_from_json(j), false);
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(r.report.at("passed").get<bool>());
}

TEST(Verify, FreshReportVerifies) {
  RunOutcome a = run_experiment(small_config(), false);
  VerifyOutcome v = verify_report(a.report);
  EXPECT_TRUE(v.ok) << (v.failures.empty() ? "" : v.failures.front());
  EXPECT_GT(v.certificates, 30);
}

TEST(Verify, TamperedWitnessIsNamed) {
  RunOutcome a = run_experiment(small_config(), false);
  Json bad = a.report;
  auto& cert = bad["results"][1]["certificates"][0];
  cert["witness"][0] = cert["witness"][0].get<double>() * 1.1;
  VerifyOutcome v = verify_report(bad);
  EXPECT_FALSE(v.ok);
  ASSERT_EQ(v.failures.size(), 1u);
  EXPECT_NE(v.failures[0].find(cert.at("id").get<std::string>()), std::string::npos);

  Json bad_map = a.report;
  auto& m = bad_map["results"][2]["certificates"][0]["map"];
  m[0][0] = m[0][0].get<double>() * 1.1;
  EXPECT_FALSE(verify_report(bad_map).ok);

  Json bad_tuple = a.report;
  auto& mats = bad_tuple["results"][3]["result"]["members"][0]["matrices"][0];
  mats[0] = mats[0].get<double>() * 1.1;
  EXPECT_FALSE(verify_report(bad_tuple).ok);
}

TEST(Verify, OtherSeedStillVerifies) {
  ExperimentConfig c = small_config();
  c.seed = 99;
  EXPECT_TRUE(verify_report(run_experiment(c, false).report).ok);
}

TEST(Serialization, RoundTrips) {
  Rng rng(1);
  UnitaryTuple u = haar_tuple(2, 3, 5);
  UnitaryTuple v = tuple_from_json(Json::parse(tuple_to_json(u).dump()));
  for (int j = 0; j < 2; ++j) EXPECT_EQ(u.matrices[j], v.matrices[j]);
  Eigen::MatrixXd m = Eigen::MatrixXd::Random(3, 2);
  EXPECT_EQ(matrix_from_json(Json::parse(matrix_to_json(m).dump())), m);
  Eigen::MatrixXi s(2, 3);
  s << 1, -1, 1, -1, -1, 1;
  EXPECT_EQ(sign_rows_to_json(s), Json::parse(R"(["+-+","--+"])"));
  EXPECT_EQ(sign_rows_from_json(sign_rows_to_json(s)), s);
  EXPECT_EQ(number(std::numeric_limits<double>::infinity()), "inf");
  PolytopalSpace l1 = space_from_json(Json::parse(R"({"name": "l1", "dim": 3})"));
  PolytopalSpace back = space_from_json(space_to_json(l1));
  EXPECT_EQ(back.functionals(), l1.functionals());
  EXPECT_THROW(space_from_json(Json::parse(R"({"name": "l7"})")), PreconditionError);
}

#ifdef BMLAB_CLI
int run_cli(const std::string& args) {
  const int status = std::system((std::string(BMLAB_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  fs::path dir = scratch("cli");
  EXPECT_EQ(run_cli("preset chains"), 0);
  EXPECT_EQ(run_cli("preset nope"), 2);
  EXPECT_EQ(run_cli("--bogus"), 2);
  EXPECT_EQ(run_cli("bounds hh -n 8 -N 2 -r 2"), 0);
  EXPECT_EQ(run_cli("bmdist claim -n 4 -r 3 --theta 0.5"), 2);

  std::ofstream(dir / "ok.json") << R"({"name": "ok", "output_dir": ")" << dir.string()
                                 << R"(", "experiments": [{"kind": "chains"}]})";
  EXPECT_EQ(run_cli("run " + (dir / "ok.json").string()), 0);
  EXPECT_EQ(run_cli("verify " + (dir / "ok.report.json").string()), 0);
  std::ofstream(dir / "fail.json") << R"({"name": "fail", "output_dir": ")" << dir.string()
                                   << R"(", "experiments": [{"kind": "tail", "params": {"max_frequency": 0, "samples": 200}}]})";
  EXPECT_EQ(run_cli("run " + (dir / "fail.json").string()), 1);
  EXPECT_TRUE(fs::exists(dir / "fail.report.json"));
  std::ofstream(dir / "bad.json") << R"({"experiments": [{"kind": "tail", "params": {"N": 0}}]})";
  EXPECT_EQ(run_cli("run " + (dir / "bad.json").string()), 2);
}
#endif

}  // namespace
}  // namespace bmlab
