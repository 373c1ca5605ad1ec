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

#ifndef INCENTIVE_DUOPOLY_HPP
#define INCENTIVE_DUOPOLY_HPP

#include <Eigen/Dense>
#include <array>

#include "incentive/core_model.hpp"
#include "incentive/monopoly.hpp"
#include "incentive/schedules.hpp"

namespace incentive {

// Firm n owns technology n.  Stacked payments are ordered
// (z^1_1, z^1_2, z^2_1, z^2_2): firm n, channel j at index 2 n + j.
using Payments4 = Eigen::Matrix<double, 4, 1>;

inline int payment_index(int firm, int channel) { return 2 * firm + channel; }

struct DuopolyCoefficients {
  double q_c = 0;         // q1 q2 - eps^2 / 4
  double cal_e = 0;       // eps^3 / (4 Q_C^2)
  Eigen::Vector2d zeta;   // zeta^C_j
  Eigen::Vector2d K;
  Eigen::Vector2d F_own;    // F_jj
  Eigen::Vector2d F_cross;  // F_ji
  Eigen::Vector2d F_const;  // F_j0
  double denom = 0;         // zeta_1 zeta_2 - E^2
};

// Volatility-dependent coefficients of the second-best system.
DuopolyCoefficients duopoly_coefficients(const Eigen::Vector2d& b, const MarketSpec& spec, double energy_scale);
// Constant coefficients of the risk-neutral (first-best) case.
DuopolyCoefficients duopoly_first_best_coefficients(const MarketSpec& spec);

TechControls bu_controls_competitive(double t, const MarketSpec& spec, double energy_scale,
                                     bool volatility_control = true);

// Equilibrium drift a^n = (q_i (z^n_n - l_n) - eps/2 (z^i_i - l_i)) / Q_C from own payments.
Eigen::Vector2d competitive_drift(const Eigen::Vector2d& own, const MarketSpec& spec);
// Best response of firm n to the other firm's drift a_other.
double individual_response(int n, double a_other, double own_payment, const MarketSpec& spec);

TechControls sb_controls_competitive(const Eigen::Vector2d& own, const Eigen::Vector2d& gamma, const MarketSpec& spec,
                                     bool volatility_control = true);

Eigen::Vector2d own_payments(const Payments4& z);

Payments4 duopoly_payment_closed_form(const Eigen::Vector2d& wP, const Eigen::Vector2d& b, const MarketSpec& spec,
                                      double energy_scale);
Payments4 duopoly_first_best_payments(const Eigen::Vector2d& wP, const MarketSpec& spec);

// m_j(z, t) = -h - sum_n eta_n (z^n_j)^2 - eta_P (w_j - sum_n z^n_j)^2
Eigen::Vector2d duopoly_m_hat(const Payments4& z, const Eigen::Vector2d& wP, const MarketSpec& spec,
                              double energy_scale);

PaymentSchedule sb_payments_competitive(const TimeGrid& grid, const MarketSpec& spec, const SolveOptions& opt = {});
// Separate constant-coefficient path for risk-neutral firms; ignores the
// configured firm risk aversions.
PaymentSchedule fb_payments_competitive(const TimeGrid& grid, const MarketSpec& spec, bool volatility_control = true);

double duopoly_system_residual(const PaymentSchedule& s, const MarketSpec& spec, const TimeGrid& grid);

ContractPrices contract_prices_competitive(const PaymentSchedule& s, const MarketSpec& spec, const TimeGrid& grid,
                                           RateMode mode = RateMode::finite_difference);

ControlSchedule bu_schedule_competitive(const TimeGrid& grid, const MarketSpec& spec, bool volatility_control = true);
ControlSchedule sb_schedule_competitive(const PaymentSchedule& s, const MarketSpec& spec);

std::array<ValueSummary, 2> agent_values_bu_competitive(const TimeGrid& grid, const MarketSpec& spec,
                                                        bool volatility_control = true);
ValueSummary principal_value_sb_competitive(const PaymentSchedule& s, const MarketSpec& spec, const TimeGrid& grid);

}  // namespace incentive

#endif  // INCENTIVE_DUOPOLY_HPP
