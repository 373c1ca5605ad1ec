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

#ifndef INCENTIVE_CORE_MODEL_HPP
#define INCENTIVE_CORE_MODEL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "incentive/errors.hpp"

namespace incentive {

enum class Market { monopoly, duopoly };

// Per-technology data is indexed j = 0 (conventional), 1 (renewable).
// Rates are in the units of the reference parameters (EUR/MWh and MW); money
// quantities are obtained by multiplying time integrals with the grid's
// energy scale.
struct AgentSpec {
  Eigen::Vector2d linear_cost{100.0, 200.0};
  Eigen::Vector2d quadratic_cost{1.0, 2.0};
  double congestion = 0.25;
  Eigen::Vector2d vol_cost_scale{1.6e13, 6.25e14};  // 2000^4, 5000^4
  Eigen::Vector2d uncontrolled_vol{300.0, 750.0};
  Eigen::Vector2d depreciation{0.0, 0.0};
  double monopolist_risk_aversion = 1e-3;
  Eigen::Vector2d competitor_risk_aversion{1e-3, 1e-3};
  double monopolist_reservation = 0.0;                // E0, money
  Eigen::Vector2d competitor_reservation{0.0, 0.0};  // E0 per firm, money
};

struct PrincipalSpec {
  double power_price = 100.0;
  Eigen::Vector2d externality{-1.0, 800.0};
  double vol_penalty = 6.25e6;  // h = 50^4
  double risk_aversion = 1e-3;
  double horizon = 10.0;
};

struct MarketSpec {
  AgentSpec agent;
  PrincipalSpec principal;
  Eigen::Vector2d initial_state{4000.0, 1000.0};
  double vol_floor_ratio = 1e-3;

  static MarketSpec reference() { return MarketSpec{}; }

  double q_monopoly() const {
    const auto& q = agent.quadratic_cost;
    return q(0) * q(1) - agent.congestion * agent.congestion;
  }
  double q_competitive() const {
    const auto& q = agent.quadratic_cost;
    return q(0) * q(1) - 0.25 * agent.congestion * agent.congestion;
  }
  Eigen::Vector2d vol_floor() const { return vol_floor_ratio * agent.uncontrolled_vol; }

  // Throws DomainError / DegenerateModelError on invalid data.
  void validate(Market market) const;
};

class TimeGrid {
 public:
  // energy_scale converts capacity-time integrals of rates into money.
  TimeGrid(double horizon, double dt, double energy_scale = 168.0);
  static TimeGrid with_steps(double horizon, int steps, double energy_scale = 168.0);

  int steps() const { return steps_; }
  int size() const { return steps_ + 1; }
  double dt() const { return dt_; }
  double horizon() const { return horizon_; }
  double energy_scale() const { return energy_scale_; }
  double time(int i) const { return times_(i); }
  const Eigen::VectorXd& times() const { return times_; }

  bool same_as(const TimeGrid& other) const {
    return steps_ == other.steps_ && horizon_ == other.horizon_;
  }

 private:
  TimeGrid() = default;

  double horizon_ = 0;
  int steps_ = 0;
  double dt_ = 0;
  double energy_scale_ = 1;
  Eigen::VectorXd times_;
};

// Closed-form marginal revenue paths on the grid, one column per technology.
Eigen::MatrixXd agent_marginal_revenue(const TimeGrid& grid, const MarketSpec& spec);
Eigen::MatrixXd principal_marginal_revenue(const TimeGrid& grid, const MarketSpec& spec);

// Column-wise time derivative: central differences inside, second-order
// one-sided stencils at both ends.
Eigen::MatrixXd time_derivative(const Eigen::MatrixXd& y, double dt);

// Below this depreciation rate the limit formula is used.
inline constexpr double kDeltaLimit = 1e-10;

template <typename Scalar>
Scalar w_agent_closed_form(Scalar t, Scalar p, Scalar delta, Scalar horizon) {
  using std::exp;
  if (!(t >= Scalar(0) && t <= horizon)) throw DomainError("w_agent_closed_form: t outside [0, T]");
  if (!(delta >= Scalar(0))) throw DomainError("w_agent_closed_form: negative depreciation");
  const Scalar tau = horizon - t;
  if (delta < Scalar(kDeltaLimit)) return p * tau;
  return p * (Scalar(1) - exp(-delta * tau)) / delta;
}

template <typename Scalar>
Scalar w_principal_closed_form(Scalar t, Scalar k, Scalar delta, Scalar horizon) {
  return w_agent_closed_form(t, k, delta, horizon);
}

// Time derivative of the closed form, -c e^{-delta (T - t)}.
template <typename Scalar>
Scalar w_closed_form_rate(Scalar t, Scalar c, Scalar delta, Scalar horizon) {
  using std::exp;
  if (delta < Scalar(kDeltaLimit)) return -c;
  return -c * exp(-delta * (horizon - t));
}

// Backward RK4 for  w' = source - A0^T w,  w(T) = terminal.  Row i holds w(t_i).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> solve_w_backward(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A0,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& source,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& terminal, const TimeGrid& grid,
    int refinement = 10) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto d = terminal.size();
  if (A0.rows() != d || A0.cols() != d || source.size() != d)
    throw DomainError("solve_w_backward: dimension mismatch");
  if (!A0.allFinite() || !source.allFinite() || !terminal.allFinite())
    throw DomainError("solve_w_backward: non-finite input");

  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> At = A0.transpose();
  auto rhs = [&](const Vector& w) -> Vector { return source - At * w; };

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(grid.size(), d);
  Vector w = terminal;
  out.row(grid.steps()) = w.transpose();
  const Scalar h = -Scalar(grid.dt()) / Scalar(refinement);
  for (int i = grid.steps(); i > 0; --i) {
    for (int r = 0; r < refinement; ++r) {
      const Vector k1 = rhs(w);
      const Vector k2 = rhs(w + Scalar(0.5) * h * k1);
      const Vector k3 = rhs(w + Scalar(0.5) * h * k2);
      const Vector k4 = rhs(w + h * k3);
      w += h / Scalar(6) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
    }
    out.row(i - 1) = w.transpose();
  }
  return out;
}

// phi(b) = (b^-2 - sigma^-2) Phi, zero at the uncontrolled level.
template <typename DB, typename DP, typename DS>
auto vol_cost(const Eigen::ArrayBase<DB>& b, const Eigen::ArrayBase<DP>& Phi,
              const Eigen::ArrayBase<DS>& sigma) {
  return (b.square().inverse() - sigma.square().inverse()) * Phi;
}

inline double vol_cost(double b, double Phi, double sigma) {
  return (1.0 / (b * b) - 1.0 / (sigma * sigma)) * Phi;
}

// Drift cost g_j(a) of technology j: l_j a_j + q_j a_j^2 / 2 + eps a_1 a_2 / 2.
inline double drift_cost(int j, const Eigen::Vector2d& a, const AgentSpec& s) {
  return s.linear_cost(j) * a(j) + 0.5 * s.quadratic_cost(j) * a(j) * a(j) +
         0.5 * s.congestion * a(0) * a(1);
}

// Agent Hamiltonian evaluated at the given (not necessarily optimal) controls,
// in rate units.  agent < 0 selects the monopolist (both technologies);
// agent = 0, 1 selects the competitor owning that technology.  gamma is the
// agent's own volatility payment matrix; z its drift payment vector.
double hamiltonian_agent(const Eigen::Vector2d& x, const Eigen::Vector2d& z,
                         const Eigen::Matrix2d& gamma, const Eigen::Vector2d& a,
                         const Eigen::Vector2d& b, const MarketSpec& spec, int agent = -1);

}  // namespace incentive

#endif  // INCENTIVE_CORE_MODEL_HPP
