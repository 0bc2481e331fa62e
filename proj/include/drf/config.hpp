// Copyright 2026 The DRF Planner Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DRF_CONFIG_HPP_
#define DRF_CONFIG_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "drf/simulation.hpp"

namespace drf {

/// A typed value: number, string, or list of numbers.
using ConfigValue = std::variant<double, std::string, std::vector<double>>;

using ConfigSection = std::map<std::string, ConfigValue>;

/// Sections vehicle, risk, growth, weights, scenario, solver, output.
struct ConfigDocument {
  std::map<std::string, ConfigSection> sections;

  const ConfigValue* find(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, ConfigValue value);
  bool operator==(const ConfigDocument&) const = default;
};

enum class ValueKind { kNumber, kInteger, kString, kList };

/// One documented key. Obstacle keys (scenario.obstacle<N>_<field>) are
/// matched by pattern and do not appear in the table.
struct KeySpec {
  const char* section;
  const char* key;
  ValueKind kind;
  const char* units;
  const char* doc;
};

const std::vector<KeySpec>& key_registry();

/// Parses INI-like text. `[section]` headers, `key = value` lines, `#` or
/// `;` comments, and an optional leading `schema=1`. Unknown sections or
/// keys, duplicates, and values of the wrong kind throw ConfigError with the
/// offending line number. No defaults are applied.
ConfigDocument parse_config(const std::string& text);

/// parse_config, then defaults (including scenario-type defaults), then
/// validation of every module invariant.
ConfigDocument resolve_config(ConfigDocument doc);
ConfigDocument load_config_text(const std::string& text);
ConfigDocument load_config(const std::filesystem::path& path);

/// Canonical text of a document, starting with `schema=1`. Numbers use the
/// shortest representation that reads back to the same double.
std::string emit_config(const ConfigDocument& doc);

enum class RenderLayer { kRoad, kRisk, kCorridor, kObstacles, kTrajectory };

std::string to_string(RenderLayer layer);

struct RenderSpec {
  std::vector<RenderLayer> layers;
  std::vector<double> snapshot_times;  // s
  int width_px = 1200;
  int height_px = 600;
  double risk_resolution = 0.5;  // m

  bool has(RenderLayer layer) const;
};

/// Throws ParameterError when no layer is enabled or sizes are invalid.
void validate(const RenderSpec& spec);

/// Typed view of a resolved document.
struct RunConfig {
  std::string type;  // lane_change | lane_keep | roundabout | lq_oracle
  Scenario scenario;
  SimulationSettings settings;
  Randomization randomization;
  bool randomize = false;
  int runs = 100;
  RenderSpec render;
  std::string render_input;

  /// lq_oracle plans with the bicycle linearized at the initial speed.
  bool linear_dynamics() const { return type == "lq_oracle"; }
};

/// Throws ConfigError naming the key and constraint on invalid input.
RunConfig to_run_config(const ConfigDocument& resolved);

}  // namespace drf

#endif  // DRF_CONFIG_HPP_
