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

#ifndef BMLAB_HARNESS_HPP
#define BMLAB_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmlab/qexpander.hpp"
#include "bmlab/spaces.hpp"

namespace bmlab {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "bmlab-report/1";
inline constexpr const char* kOutputDirEnv = "BMLAB_OUTPUT_DIR";

struct ExperimentSpec {
  std::string kind;
  /// Parameters with defaults filled in.
  Json params;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 0;
  /// Empty: $BMLAB_OUTPUT_DIR, else the working directory.
  std::string output_dir;
  bool csv = false;
  std::vector<ExperimentSpec> experiments;
};

/// Experiment kinds understood by run_experiment, in documentation order.
std::vector<std::string> experiment_kinds();

/// Default parameters of a kind.
Json default_params(const std::string& kind);

/// Parses and validates; throws PreconditionError naming the offending field.
ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& config);

/// Range checks for every experiment (the same checks config_from_json runs).
void validate_config(const ExperimentConfig& config);

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

struct RunOutcome {
  Json report;
  bool passed = true;
  /// Files written (report first, then CSV tables).
  std::vector<std::string> files;
};

/// Runs every experiment in order. `write` controls file output.
RunOutcome run_experiment(const ExperimentConfig& config, bool write = true);

/// The report without wall-clock fields, for reproducibility comparisons.
Json strip_timing(const Json& report);

struct VerifyOutcome {
  bool ok = true;
  int certificates = 0;
  std::vector<std::string> failures;
};

/// Re-evaluates every stored certificate from its witness data.
VerifyOutcome verify_report(const Json& report);
VerifyOutcome verify_report_file(const std::string& path);

/// Resolved output directory for a config.
std::string output_directory(const ExperimentConfig& config);

// Serialization helpers shared with the command line tool.

/// {"name": "l1"|"l2"|"linf", "dim": n} or {"functionals": [[...]], "euclidean": [[...]]}.
PolytopalSpace space_from_json(const Json& j);
Json space_to_json(const PolytopalSpace& space);

Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j);

/// Interleaved re/im, row-major.
Json complex_matrix_to_json(const MatrixXc& m);
MatrixXc complex_matrix_from_json(const Json& j, int N);

Json tuple_to_json(const UnitaryTuple& u);
UnitaryTuple tuple_from_json(const Json& j);

/// Sign vectors as strings of '+' and '-'.
Json sign_rows_to_json(const Eigen::MatrixXi& rows);
Eigen::MatrixXi sign_rows_from_json(const Json& j);

/// Finite numbers as numbers; infinities and NaN as strings.
Json number(double x);

}  // namespace bmlab

#endif  // BMLAB_HARNESS_HPP
