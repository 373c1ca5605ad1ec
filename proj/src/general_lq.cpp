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

#include "incentive/general_lq.hpp"

namespace incentive {

namespace {

void fill_common(GeneralModel<double>& g, const MarketSpec& spec, double energy_scale, bool volatility_control) {
  const auto& a = spec.agent;
  const auto& p = spec.principal;
  g.d = 2;
  g.drift_state = -Eigen::Matrix2d(a.depreciation.asDiagonal());
  g.vol_cost_scale = a.vol_cost_scale;
  g.uncontrolled_vol = a.uncontrolled_vol;
  g.vol_floor_ratio = spec.vol_floor_ratio;
  g.volatility_control = volatility_control;
  g.principal_risk_aversion = energy_scale * p.risk_aversion;
  g.running_weight = p.externality - Eigen::Vector2d::Constant(p.power_price);
  g.terminal_bonus = Eigen::Vector2d::Zero();
  g.qv_weight = Eigen::Matrix2d::Constant(-p.vol_penalty);
}

}  // namespace

GeneralModel<double> embed_monopoly(const MarketSpec& spec, double energy_scale, bool volatility_control) {
  const auto& a = spec.agent;
  GeneralModel<double> g;
  fill_common(g, spec, energy_scale, volatility_control);
  g.N = 1;
  g.loading = {Eigen::MatrixXd::Identity(2, 2)};
  g.state_cost = {Eigen::VectorXd::Constant(2, -spec.principal.power_price)};
  g.linear_cost = {a.linear_cost};
  Eigen::Matrix2d Q;
  Q << a.quadratic_cost(0), a.congestion, a.congestion, a.quadratic_cost(1);
  g.quadratic_cost = {Q};
  g.vol_owner = {0, 0};
  g.risk_aversion = {energy_scale * a.monopolist_risk_aversion};
  return g;
}

// Firm n owns technology n; its second control component does not move the
// state and carries an idle quadratic cost so the own block stays invertible.
GeneralModel<double> embed_duopoly(const MarketSpec& spec, double energy_scale, bool volatility_control,
                                   double idle_cost) {
  const auto& a = spec.agent;
  const double p = spec.principal.power_price;
  GeneralModel<double> g;
  fill_common(g, spec, energy_scale, volatility_control);
  g.N = 2;
  g.loading.assign(2, Eigen::MatrixXd::Zero(2, 2));
  g.loading[0](0, 0) = 1.0;
  g.loading[1](1, 1) = 1.0;
  g.state_cost = {Eigen::Vector2d(-p, 0.0), Eigen::Vector2d(0.0, -p)};
  g.linear_cost.assign(2, Eigen::VectorXd::Zero(4));
  g.linear_cost[0](0) = a.linear_cost(0);
  g.linear_cost[1](3) = a.linear_cost(1);
  g.quadratic_cost.assign(2, Eigen::MatrixXd::Zero(4, 4));
  auto& Q1 = g.quadratic_cost[0];
  auto& Q2 = g.quadratic_cost[1];
  Q1(0, 0) = a.quadratic_cost(0);
  Q1(1, 1) = idle_cost;
  Q1(0, 3) = Q1(3, 0) = 0.5 * a.congestion;
  Q2(3, 3) = a.quadratic_cost(1);
  Q2(2, 2) = idle_cost;
  Q2(0, 3) = Q2(3, 0) = 0.5 * a.congestion;
  g.vol_owner = {0, 1};
  g.risk_aversion = {energy_scale * a.competitor_risk_aversion(0), energy_scale * a.competitor_risk_aversion(1)};
  return g;
}

}  // namespace incentive
