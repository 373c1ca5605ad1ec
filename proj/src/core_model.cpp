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

#include "incentive/core_model.hpp"

#include <cmath>

namespace incentive {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(std::string("MarketSpec: ") + what);
}

}  // namespace

void MarketSpec::validate(Market market) const {
  const auto& a = agent;
  const auto& p = principal;
  require(a.linear_cost.allFinite(), "linear_cost must be finite");
  require((a.quadratic_cost.array() > 0).all(), "quadratic_cost must be positive");
  require(std::isfinite(a.congestion), "congestion must be finite");
  require((a.vol_cost_scale.array() > 0).all(), "vol_cost_scale must be positive");
  require((a.uncontrolled_vol.array() > 0).all(), "uncontrolled_vol must be positive");
  require((a.depreciation.array() >= 0).all(), "depreciation must be nonnegative");
  require(a.monopolist_risk_aversion >= 0, "monopolist risk aversion must be nonnegative");
  require((a.competitor_risk_aversion.array() >= 0).all(), "competitor risk aversion must be nonnegative");
  require(std::isfinite(a.monopolist_reservation) && a.competitor_reservation.allFinite(),
          "reservation values must be finite");
  require(std::isfinite(p.power_price), "power_price must be finite");
  require(p.externality.allFinite(), "externality must be finite");
  require(p.vol_penalty >= 0, "vol_penalty must be nonnegative");
  require(p.risk_aversion > 0, "principal risk aversion must be positive");
  require(p.horizon > 0, "horizon must be positive");
  require(initial_state.allFinite(), "initial_state must be finite");
  require(vol_floor_ratio > 0 && vol_floor_ratio < 1, "vol_floor_ratio must lie in (0, 1)");
  const double det = market == Market::monopoly ? q_monopoly() : q_competitive();
  if (det == 0.0) throw DegenerateModelError("MarketSpec: drift cost determinant vanishes", INFINITY);
}

TimeGrid::TimeGrid(double horizon, double dt, double energy_scale)
    : horizon_(horizon), steps_(0), dt_(dt), energy_scale_(energy_scale) {
  if (!(horizon > 0) || !(dt > 0)) throw DomainError("TimeGrid: horizon and dt must be positive");
  if (!(energy_scale > 0)) throw DomainError("TimeGrid: energy scale must be positive");
  const double m = std::round(horizon / dt);
  if (m < 1 || std::abs(m * dt - horizon) > 1e-9 * horizon)
    throw DomainError("TimeGrid: dt does not divide the horizon");
  *this = with_steps(horizon, static_cast<int>(m), energy_scale);
}

TimeGrid TimeGrid::with_steps(double horizon, int steps, double energy_scale) {
  if (!(horizon > 0) || steps < 1) throw DomainError("TimeGrid: need a positive horizon and at least one step");
  if (!(energy_scale > 0)) throw DomainError("TimeGrid: energy scale must be positive");
  TimeGrid g;
  g.horizon_ = horizon;
  g.steps_ = steps;
  g.dt_ = horizon / steps;
  g.energy_scale_ = energy_scale;
  g.times_.resize(steps + 1);
  for (int i = 0; i <= steps; ++i) g.times_(i) = horizon * i / steps;
  g.times_(steps) = horizon;
  return g;
}

Eigen::MatrixXd agent_marginal_revenue(const TimeGrid& grid, const MarketSpec& spec) {
  Eigen::MatrixXd w(grid.size(), 2);
  const double T = grid.horizon();
  for (int i = 0; i < grid.size(); ++i)
    for (int j = 0; j < 2; ++j)
      w(i, j) = w_agent_closed_form(grid.time(i), spec.principal.power_price, spec.agent.depreciation(j), T);
  return w;
}

Eigen::MatrixXd principal_marginal_revenue(const TimeGrid& grid, const MarketSpec& spec) {
  Eigen::MatrixXd w(grid.size(), 2);
  const double T = grid.horizon();
  for (int i = 0; i < grid.size(); ++i)
    for (int j = 0; j < 2; ++j)
      w(i, j) = w_principal_closed_form(grid.time(i), spec.principal.externality(j), spec.agent.depreciation(j), T);
  return w;
}

Eigen::MatrixXd time_derivative(const Eigen::MatrixXd& y, double dt) {
  const Eigen::Index n = y.rows();
  if (n < 3) throw DomainError("time_derivative: need at least three grid points");
  Eigen::MatrixXd d(n, y.cols());
  for (Eigen::Index i = 1; i + 1 < n; ++i) d.row(i) = (y.row(i + 1) - y.row(i - 1)) / (2 * dt);
  d.row(0) = (-3 * y.row(0) + 4 * y.row(1) - y.row(2)) / (2 * dt);
  d.row(n - 1) = (3 * y.row(n - 1) - 4 * y.row(n - 2) + y.row(n - 3)) / (2 * dt);
  return d;
}

double hamiltonian_agent(const Eigen::Vector2d& x, const Eigen::Vector2d& z, const Eigen::Matrix2d& gamma,
                         const Eigen::Vector2d& a, const Eigen::Vector2d& b, const MarketSpec& spec, int agent) {
  const auto& s = spec.agent;
  const Eigen::Vector2d lo = spec.vol_floor();
  for (int j = 0; j < 2; ++j) {
    const double tol = 1e-12 * s.uncontrolled_vol(j);
    if (!(b(j) >= lo(j) - tol && b(j) <= s.uncontrolled_vol(j) + tol))
      throw DomainError("hamiltonian_agent: volatility control outside the admissible band");
  }
  if (agent > 1) throw DomainError("hamiltonian_agent: agent index must be -1, 0 or 1");

  const Eigen::Vector2d drift = a - s.depreciation.cwiseProduct(x);
  const double trace = 0.5 * (b.array().square() * gamma.diagonal().array()).sum();
  const double p = spec.principal.power_price;
  if (agent < 0) {
    double cost = 0;
    for (int j = 0; j < 2; ++j)
      cost += drift_cost(j, a, s) + vol_cost(b(j), s.vol_cost_scale(j), s.uncontrolled_vol(j));
    return p * x.sum() + z.dot(drift) - cost + trace;
  }
  const int n = agent;
  const double cost = drift_cost(n, a, s) + vol_cost(b(n), s.vol_cost_scale(n), s.uncontrolled_vol(n));
  return p * x(n) + z.dot(drift) - cost + trace;
}

}  // namespace incentive
