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

#ifndef INCENTIVE_MONOPOLY_HPP
#define INCENTIVE_MONOPOLY_HPP

#include <Eigen/Dense>
#include <array>

#include "incentive/core_model.hpp"
#include "incentive/fixed_point.hpp"
#include "incentive/schedules.hpp"

namespace incentive {

struct MonopolyCoefficients {
  double q_m;             // q1 q2 - eps^2
  Eigen::Vector2d zeta;   // b_j^2 (eta_P + eta_A) + q_i / Q_M
};

MonopolyCoefficients monopoly_coefficients(const Eigen::Vector2d& b, const MarketSpec& spec, double energy_scale);

// Drift and volatility controls of both technologies.
struct TechControls {
  Eigen::Vector2d a;
  Eigen::Vector2d b;
  std::array<bool, 2> interior{false, false};  // volatility strictly inside its band
};

TechControls bu_controls_monopoly(double t, const MarketSpec& spec, double energy_scale,
                                  bool volatility_control = true);

// Constant BU drift slope; requires zero depreciation.
Eigen::Vector2d bu_slope_monopoly(const MarketSpec& spec);

// a_j = (q_i (z_j - l_j) - eps (z_i - l_i)) / Q_M
Eigen::Vector2d monopoly_drift(const Eigen::Vector2d& z, const MarketSpec& spec);

TechControls sb_controls_monopoly(const Eigen::Vector2d& z, const Eigen::Vector2d& gamma, const MarketSpec& spec,
                                  bool volatility_control = true);

// Second-best drift payments for given volatilities b (closed form of the
// 2x2 payment system).
Eigen::Vector2d monopoly_payment_closed_form(const Eigen::Vector2d& wP, const Eigen::Vector2d& b,
                                             const MarketSpec& spec, double energy_scale);

// m_j(z_j, t) = -h - eta_A z_j^2 - eta_P (w_j - z_j)^2
Eigen::Vector2d monopoly_m_hat(const Eigen::Vector2d& z, const Eigen::Vector2d& wP, const MarketSpec& spec,
                               double energy_scale);

struct SolveOptions {
  bool volatility_control = true;
  PicardOptions picard;
};

PaymentSchedule sb_payments_monopoly(const TimeGrid& grid, const MarketSpec& spec, const SolveOptions& opt = {});

// Max relative residual of (z, gamma) in the defining closed-form system.
double monopoly_system_residual(const PaymentSchedule& s, const MarketSpec& spec, const TimeGrid& grid);

enum class RateMode {
  finite_difference,  // z' by central differences
  frozen_gamma,       // z' from the closed form with the volatilities held fixed
};

ContractPrices contract_prices_monopoly(const PaymentSchedule& s, const MarketSpec& spec, const TimeGrid& grid,
                                        RateMode mode = RateMode::finite_difference);

ControlSchedule bu_schedule_monopoly(const TimeGrid& grid, const MarketSpec& spec, bool volatility_control = true);
ControlSchedule sb_schedule_monopoly(const PaymentSchedule& s, const MarketSpec& spec);

// Certainty-equivalent decomposition: integrand w0 on the grid and the money
// value  kappa (w(0) . X0 + int w0 dt)  (minus E0 for the principal).
struct ValueSummary {
  Eigen::VectorXd w0;
  double value = 0.0;
};

ValueSummary agent_value_bu_monopoly(const TimeGrid& grid, const MarketSpec& spec, bool volatility_control = true);
ValueSummary principal_value_sb_monopoly(const PaymentSchedule& s, const MarketSpec& spec, const TimeGrid& grid);

double trapezoid(const Eigen::VectorXd& f, double dt);

}  // namespace incentive

#endif  // INCENTIVE_MONOPOLY_HPP
