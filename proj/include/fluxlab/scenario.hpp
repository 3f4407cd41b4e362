#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fluxlab/constants.hpp"
#include "json.hpp"

namespace fluxlab {

inline constexpr const char* kVersion = "0.1.0";

enum class ScenarioKind {
  LoopPhase,
  TwoBodyDynamics,
  CageCancellation,
  ShieldDesign,
  CovarianceCheck,
  OverlapConvergence,
};

std::string to_string(ScenarioKind kind);

// A validated scenario. `parameters` holds every key of the kind, with
// defaults filled in, so re-serialising a parsed config is a fixed point.
struct ScenarioConfig {
  ScenarioKind kind;
  nlohmann::json parameters;
  std::string output_path;
  std::uint64_t seed = 0;
  // Directory that relative paths resolve against; not serialised.
  std::string base_dir;
};

struct ValidationError {
  int line;  // 1-based line in the config text
  std::string message;
};

struct ValidationResult {
  std::optional<ScenarioConfig> config;
  std::vector<ValidationError> errors;
};

// Structural and unit validation of a JSON scenario document. Reports every
// problem found, not only the first.
ValidationResult validate_config(std::string_view text, std::string base_dir = ".");

nlohmann::json to_json(const ScenarioConfig& config);
// Canonical text: sorted keys, two-space indent, trailing newline.
std::string serialize(const ScenarioConfig& config);

struct ScenarioOutput {
  nlohmann::json report;
  std::string trajectory_csv;  // two_body_dynamics only
};

// Computes the report for a scenario without touching the filesystem beyond
// reading input CSVs. Numeric failures propagate as fluxlab::Error.
ScenarioOutput run_scenario(const ScenarioConfig& config);

// Where run_config_file writes the trajectory of a dynamics scenario:
// the report path with its extension replaced by "_trajectory.csv".
std::string trajectory_path(const std::string& report_path);

nlohmann::json constants_json(const PhysicalConstants& k = codata());

// Exit codes of the fluxlab tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;

// validate + run + write the report (and, for dynamics, the trajectory CSV).
// Diagnostics go to `err` prefixed with `source_name`.
int run_config_file(const std::string& path, std::ostream& out, std::ostream& err);
int validate_config_file(const std::string& path, std::ostream& out, std::ostream& err);

}  // namespace fluxlab
