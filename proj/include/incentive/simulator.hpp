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

#ifndef INCENTIVE_SIMULATOR_HPP
#define INCENTIVE_SIMULATOR_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "incentive/core_model.hpp"
#include "incentive/schedules.hpp"

namespace incentive {

struct SimulationOptions {
  int threads = 0;                  // 0: INCENTIVE_THREADS or hardware concurrency
  bool squared_increments = false;  // realized (dX)^2 instead of b^2 dt
};

// Paths are stored row-wise: x1(p, i) is technology 1 on path p at t_i.
// qv holds the quadratic-variation increment of each step.
struct PathBundle {
  std::uint64_t seed = 0;
  int n_paths = 0;
  Eigen::MatrixXd x1, x2;
  Eigen::MatrixXd qv1, qv2;
  std::vector<unsigned char> went_negative;
  // Contract values accumulated during the simulation (one column per firm),
  // filled when prices are passed to simulate_paths.
  Eigen::MatrixXd streamed_contract;
};

PathBundle simulate_paths(const ControlSchedule& schedule, const Eigen::Vector2d& x0, const Eigen::Vector2d& delta,
                          const TimeGrid& grid, int n_paths, std::uint64_t seed, const SimulationOptions& opt = {},
                          const ContractPrices* stream_prices = nullptr);

// Terminal states only (n_paths x 2), same random numbers as simulate_paths.
Eigen::MatrixXd simulate_terminal(const ControlSchedule& schedule, const Eigen::Vector2d& x0,
                                  const Eigen::Vector2d& delta, const TimeGrid& grid, int n_paths,
                                  std::uint64_t seed, const SimulationOptions& opt = {});

struct ContractValues {
  Eigen::VectorXd fixed;     // per firm
  Eigen::MatrixXd variable;  // n_paths x firms, money
  Eigen::MatrixXd total;     // fixed + variable

  Eigen::VectorXd mean() const { return total.colwise().mean().transpose(); }
};

ContractValues evaluate_contract(const PathBundle& bundle, const ContractPrices& prices, const TimeGrid& grid);

struct ScenarioMetrics {
  int n_paths = 0;
  Eigen::MatrixXd mean;  // rows x 3: X1, X2, X1 + X2
  Eigen::MatrixXd q05;
  Eigen::MatrixXd q95;
  Eigen::VectorXd share;  // mean X2 / mean (X1 + X2) at each t
  double terminal_share = 0, terminal_share_se = 0;
  double terminal_total = 0, terminal_total_se = 0;
  double pathwise_share = 0, pathwise_share_se = 0;  // mean of X2/(X1+X2) at T
  Eigen::Vector2d qv_rate = Eigen::Vector2d::Zero();  // time-averaged realized QV
  int negative_paths = 0;
};

ScenarioMetrics scenario_metrics(const PathBundle& bundle, const TimeGrid& grid);

int resolve_threads(int requested);

}  // namespace incentive

#endif  // INCENTIVE_SIMULATOR_HPP
