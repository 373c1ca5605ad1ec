/*
 Copyright 2026 The incentive authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef INCENTIVE_CONFIG_HPP
#define INCENTIVE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "incentive/core_model.hpp"
#include "incentive/schedules.hpp"

namespace incentive {

struct ScenarioName {
  Market market = Market::monopoly;
  Regime regime = Regime::SB;
  bool volatility_control = true;

  std::string str() const;
  static ScenarioName parse(const std::string& s);  // "M-SB-DVC"
  static std::vector<ScenarioName> all();
};

struct ScenarioConfig {
  ScenarioName scenario;
  MarketSpec spec;
  double dt = 1.0 / 52.0;
  double energy_scale = 168.0;
  int n_paths = 1000;
  std::uint64_t seed = 42;
  int threads = 0;
  std::string output_dir = "out";
};

// Field-level diagnostic; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& field, const std::string& what);
  std::string field;
  int line;
};

// Flat "key = value" text, '#' starts a comment.  Omitted keys keep the
// reference values.
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

// A manifest is a config that lists one or more "run = ..." entries, each a
// scenario name (run with the manifest's other keys) or a config file path
// relative to the manifest.
bool is_manifest(const std::string& text);
std::vector<ScenarioConfig> load_manifest(const std::filesystem::path& path);

// Key/value rendering of a config (round-trips through parse_config).
std::string render_config(const ScenarioConfig& c);

}  // namespace incentive

#endif  // INCENTIVE_CONFIG_HPP
