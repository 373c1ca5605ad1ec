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

#ifndef INCENTIVE_SCENARIO_HPP
#define INCENTIVE_SCENARIO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "incentive/config.hpp"
#include "incentive/simulator.hpp"

namespace incentive {

struct ScenarioResult {
  explicit ScenarioResult(const TimeGrid& g) : grid(g) {}

  ScenarioConfig config;
  std::string name;
  std::string method;  // which solver path produced the payments
  TimeGrid grid;
  std::optional<PaymentSchedule> payments;  // SB and FB only
  Eigen::MatrixXd agent_marginal_revenue;   // BU only
  ControlSchedule controls;
  std::optional<ContractPrices> prices;
  std::optional<ContractValues> contract;
  ScenarioMetrics metrics;
  nlohmann::json summary;
};

ScenarioResult run_scenario(const ScenarioConfig& config);

// Writes payments.csv, controls.csv, prices.csv, paths.csv, summary.json.
void write_outputs(const ScenarioResult& result, const std::filesystem::path& dir);

std::string format_number(double v);

// Published total contract values of the four second-best scenarios.
std::optional<double> reference_contract_value(const std::string& scenario);

struct Report {
  std::string table;
  bool ordering_checked = false;
  bool ordering_holds = false;
  std::vector<std::string> missing;  // of the four ordering scenarios
};

Report render_report(const std::vector<nlohmann::json>& summaries);

// Reads DIR/*/summary.json; throws std::runtime_error when fewer than two
// scenario outputs are found.
std::vector<nlohmann::json> load_summaries(const std::filesystem::path& dir);

}  // namespace incentive

#endif  // INCENTIVE_SCENARIO_HPP
