#pragma once

// Scenario files: JSON documents with top-level keys channel, sources,
// receiver, noise, experiment, output and seed. Unknown keys are rejected.
// Omitted channel fields fall back to u = 140 cm/s, H = 180 cm,
// K = 0.242 cm^2/s, r_d = 2 cm.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aerochan/channel.hpp"
#include "aerochan/receiver.hpp"

namespace aerochan {

struct AxisSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  std::vector<double> values() const;
};

struct ExperimentSpec {
  std::string kind;  // informational; the CLI subcommand selects the runner
  std::vector<double> distances{50, 100, 150, 200, 250, 300, 350, 400, 450, 500};
  std::vector<double> wind_speeds{70, 140, 280};
  double fraction = 0.01;
  std::string ratio_mode = "receiver";  // "receiver" or "center"
  std::vector<double> pmd_distances{100, 200, 500, 1000, 2000, 3000, 4000, 5000, 6000, 8000, 10000};
  double pmd_calibration = 1.96e4;  // xi gamma R_b / (8 sigma^2)
  bool pmd_empirical = false;
  std::vector<double> mc_distances{2000, 4000, 6000};
  std::uint64_t mc_trials = 1000000;
  AxisSpec field_x{10.0, 500.0, 50};
  AxisSpec field_y{-10.0, 10.0, 41};
  AxisSpec field_z{170.0, 190.0, 41};
  std::vector<double> times{0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> omegas{0, 25, 50, 100, 150, 200, 300, 400};
  int jobs = 1;
};

struct OutputSpec {
  std::string format = "csv";  // "csv" or "json"
  std::string path;
  bool include_timestamp = false;
};

struct ScenarioConfig {
  ChannelParams channel;
  double source_height = kDefaultSourceHeight;
  MultiUserScenario sources;
  ReceiverSpec receiver;
  std::optional<BindingParams> binding;  // overrides receiver.binding_fraction
  QuadratureOrders quadrature;
  double prior_infected = 0.5;
  NoiseModel noise;
  ExperimentSpec experiment;
  OutputSpec output;
  std::optional<std::uint64_t> seed;

  /// Default channel and receiver with one breathing user (R_b = 1) at (0, 0, H) and the
  /// receiver in line at (100, 0, H).
  static ScenarioConfig defaults();

  void validate() const;

  /// Emission rate of the first user's breath (1 if there are no users).
  double breath_rate() const;
};

ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Loads `path` (or defaults when empty), applies `--set` style overrides
/// and validates.
ScenarioConfig load_scenario(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides);

/// Fully expanded document; parse_scenario(to_json(c)) reproduces c.
nlohmann::json to_json(const ScenarioConfig& config);

/// Compact, key-sorted serialization used for hashing.
std::string canonical_form(const ScenarioConfig& config);

/// FNV-1a 64-bit hash of the canonical form, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

/// Applies "dotted.path=value" to a scenario document. The value is parsed
/// as JSON when possible and taken as a string otherwise. Paths may only
/// name fields of the schema.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// JSON schema shipped with the tool.
const char* scenario_schema();

}  // namespace aerochan
