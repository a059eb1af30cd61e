#pragma once

// Experiment configuration (JSON) and the command runner behind the
// erasure-lab binary.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "erasure_lab/erasure.hpp"
#include "erasure_lab/state_core.hpp"

namespace erasure_lab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Schmidt, SearchBases, ErasureSimple, ErasureDelayed, ErasureWhichWay, Verify, CutDemo };

std::string_view to_string(Command c);
/// Accepts the config spelling ("erasure-simple") of every command.
std::optional<Command> parse_command(std::string_view name);

struct ExperimentConfig {
  Command command = Command::Verify;
  std::string output_path = ".";
  double tolerance = kEqualityTol;

  double slit_separation = 1.0;
  double envelope_width = 8.0;
  double phase_gradient = 0.39269908169872414;
  std::size_t n_bins = 16;
  double bin_width = 0.5;
  double span = 8.0;
  MeasurementBasis basis = MeasurementBasis::PlusMinus;
  BornRule born_rule = BornRule::IntensityIntegral;
  std::size_t quadrature_points = 256;

  std::size_t grid_steps = 16;   // search-bases
  std::uint64_t seed = 1;        // cut-demo
  std::size_t injections = 20;   // cut-demo
  /// State for `schmidt`; the maximally entangled pair when empty.
  std::optional<StateVector> state;

  ErasureConfig erasure() const;
};

/// Validates and fills defaults. Throws ConfigError naming the offending key.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig parse_config(const nlohmann::json& doc);
inline ExperimentConfig parse_config(const char* text) { return parse_config(std::string_view(text)); }
inline ExperimentConfig parse_config(const std::string& text) { return parse_config(std::string_view(text)); }
/// Every field, so that parse_config(to_json(c)) == c.
nlohmann::json to_json(const ExperimentConfig& config);
/// FNV-1a over the canonical (sorted-key) JSON dump, 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

struct CheckResult {
  std::string name;
  bool pass = false;
  double max_deviation = 0.0;
  double tolerance = 0.0;
};

struct RunReport {
  std::string command;
  std::string config_hash;
  std::vector<CheckResult> checks;
  std::vector<std::string> files;
  std::vector<std::string> summary;  // human-readable lines

  bool passed() const;
  nlohmann::json to_json() const;
};

/// Runs one command, writing its outputs (and report.json) under
/// config.output_path. Throws IoError with the failing path.
RunReport execute(const ExperimentConfig& config);

/// Shortest decimal that round-trips the double.
std::string shortest(double value);

}  // namespace erasure_lab
