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

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "incentive/config.hpp"
#include "incentive/scenario.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kMissingOutputs = 3;
constexpr int kSolverError = 4;

int report(const std::string& dir) {
  std::vector<nlohmann::json> summaries;
  try {
    summaries = incentive::load_summaries(dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMissingOutputs;
  }
  const auto rep = incentive::render_report(summaries);
  std::cout << rep.table;
  return rep.ordering_checked && !rep.ordering_holds ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-best regulation contracts for renewable capacity: scenario runner"};
  std::string config_path, out_dir = "out", scenario;
  int paths = 1000;
  std::uint64_t seed = 42;
  bool report_mode = false;
  app.add_option("--config", config_path, "scenario config or batch manifest");
  app.add_option("--out", out_dir, "output directory (one subdirectory per scenario)");
  auto* paths_opt = app.add_option("--paths", paths, "Monte Carlo paths (default 1000)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (default 42)");
  app.add_option("--scenario", scenario, "scenario name such as M-SB-DVC, or 'all'");
  app.add_flag("--report", report_mode, "print the comparison table for the outputs in --out");
  CLI11_PARSE(app, argc, argv);

  if (report_mode) return report(out_dir);

  std::vector<incentive::ScenarioConfig> configs;
  try {
    if (config_path.empty()) {
      configs.push_back(incentive::ScenarioConfig{});
    } else {
      std::ifstream in(config_path);
      if (!in) throw incentive::ConfigError(config_path, 0, "<file>", "cannot open");
      std::stringstream ss;
      ss << in.rdbuf();
      if (incentive::is_manifest(ss.str()))
        configs = incentive::load_manifest(config_path);
      else
        configs.push_back(incentive::parse_config(ss.str(), config_path));
    }
    if (!scenario.empty()) {
      if (scenario == "all") {
        const auto base = configs.front();
        configs.clear();
        for (const auto& n : incentive::ScenarioName::all()) {
          configs.push_back(base);
          configs.back().scenario = n;
        }
      } else {
        const auto name = incentive::ScenarioName::parse(scenario);
        for (auto& c : configs) c.scenario = name;
      }
    }
    for (auto& c : configs) {
      if (paths_opt->count()) c.n_paths = paths;
      if (seed_opt->count()) c.seed = seed;
      if (c.n_paths <= 0) throw incentive::ConfigError("--paths", 0, "n_paths", "must be positive");
    }
  } catch (const incentive::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  for (const auto& c : configs) {
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto result = incentive::run_scenario(c);
      const auto dir = std::filesystem::path(out_dir) / result.name;
      incentive::write_outputs(result, dir);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::cout << result.name << ": share_T " << result.metrics.terminal_share << ", capacity_T "
                << result.metrics.terminal_total;
      if (result.contract) std::cout << ", contract " << result.contract->mean().sum();
      std::cout << " (" << secs << " s) -> " << dir.string() << "\n";
    } catch (const incentive::ConvergenceError& e) {
      std::cerr << c.scenario.str() << ": solver error: " << e.what() << "\n";
      return kSolverError;
    } catch (const incentive::DegenerateSystemError& e) {
      std::cerr << c.scenario.str() << ": solver error: " << e.what() << "\n";
      return kSolverError;
    } catch (const std::exception& e) {
      std::cerr << c.scenario.str() << ": error: " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}
