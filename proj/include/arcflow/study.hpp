#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arcflow/io.hpp"
#include "arcflow/spaces.hpp"

namespace arcflow {

/// Command-line overrides applied on top of the config document.
struct StudyOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> n_max;
};

struct StudyConfig {
  SpaceSpec space_spec;
  SpacePtr space;
  std::map<std::string, ArcField> fields;
  std::optional<std::string> field;
  std::vector<std::string> sum;
  std::vector<std::string> triple;
  Point initial;
  double initial_time = 0.0;
  std::optional<Point> initial_b;
  double initial_b_time = 0.0;
  SolveOptions solve;
  ProbeWindow probe;
  int level_lo = 4;
  int level_hi = 10;
  std::size_t audit_samples = 1000;
  std::optional<double> K_A;
  Json oracle;
  Json checks;
};

/// Parses a study document. Throws ConfigError on a malformed document or an
/// unknown field reference.
StudyConfig parse_config(const Json& doc, const StudyOverrides& overrides = {});

SpaceSpec parse_space_spec(const Json& doc);
FieldSpec parse_field_spec(const Json& doc);

/// Exit statuses of a study.
enum StudyExit : int {
  kStudyOk = 0,
  kStudyConfigError = 2,
  kStudyToleranceFailure = 3,
  kStudyCheckFailure = 4,
};

struct StudyResult {
  int exit_code = kStudyOk;
  std::vector<std::string> files;
  std::string message;
};

/// The study commands, in the order they are documented.
const std::vector<std::string>& study_commands();

/// Runs `command` and writes its artifacts into `out_dir` (created if
/// missing). Never throws; failures are reported through the exit code.
StudyResult run_study(const std::string& command, const Json& config,
                      const std::filesystem::path& out_dir,
                      const StudyOverrides& overrides = {});

}  // namespace arcflow
