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

#include "incentive/monopoly.hpp"

#include <cmath>

#include "incentive/general_lq.hpp"

namespace incentive {

namespace {

inline int other(int j) { return 1 - j; }

double checked_q_m(const MarketSpec& spec) {
  const double q = spec.q_monopoly();
  if (q == 0.0) throw DegenerateModelError("monopoly: q1 q2 - eps^2 vanishes", INFINITY);
  return q;
}

Eigen::Vector2d response_vol(const Eigen::Vector2d& gamma, const MarketSpec& spec, bool volatility_control,
                             std::array<bool, 2>* interior = nullptr) {
  const auto& s = spec.agent;
  Eigen::Vector2d b = s.uncontrolled_vol;
  for (int j = 0; j < 2; ++j) {
    if (!volatility_control) continue;
    const auto r = vol_best_response(gamma(j), s.vol_cost_scale(j), s.uncontrolled_vol(j), spec.vol_floor_ratio);
    b(j) = r.b;
    if (interior) (*interior)[j] = r.interior;
  }
  return b;
}

}  // namespace

double trapezoid(const Eigen::VectorXd& f, double dt) {
  if (f.size() < 2) return 0.0;
  return dt * (f.sum() - 0.5 * (f(0) + f(f.size() - 1)));
}

MonopolyCoefficients monopoly_coefficients(const Eigen::Vector2d& b, const MarketSpec& spec, double energy_scale) {
  const double q_m = checked_q_m(spec);
  const auto& q = spec.agent.quadratic_cost;
  const double eta = energy_scale * (spec.principal.risk_aversion + spec.agent.monopolist_risk_aversion);
  MonopolyCoefficients c{q_m, {}};
  for (int j = 0; j < 2; ++j) c.zeta(j) = b(j) * b(j) * eta + q(other(j)) / q_m;
  return c;
}

TechControls bu_controls_monopoly(double t, const MarketSpec& spec, double energy_scale, bool volatility_control) {
  const auto& s = spec.agent;
  Eigen::Vector2d w;
  for (int j = 0; j < 2; ++j)
    w(j) = w_agent_closed_form(t, spec.principal.power_price, s.depreciation(j), spec.principal.horizon);
  TechControls c;
  c.a = monopoly_drift(w, spec);
  // The agent's own risk premium plays the role of -gamma.
  const double eta = energy_scale * s.monopolist_risk_aversion;
  const Eigen::Vector2d gamma = -eta * w.cwiseAbs2();
  c.b = response_vol(gamma, spec, volatility_control, &c.interior);
  return c;
}

Eigen::Vector2d bu_slope_monopoly(const MarketSpec& spec) {
  if (spec.agent.depreciation.cwiseAbs().maxCoeff() != 0.0)
    throw UnsupportedCaseError("bu_slope_monopoly: the slope is constant only without depreciation");
  const double q_m = checked_q_m(spec);
  const auto& q = spec.agent.quadratic_cost;
  const double p = spec.principal.power_price, eps = spec.agent.congestion;
  return {-p * (q(1) - eps) / q_m, -p * (q(0) - eps) / q_m};
}

Eigen::Vector2d monopoly_drift(const Eigen::Vector2d& z, const MarketSpec& spec) {
  const double q_m = checked_q_m(spec);
  const auto& s = spec.agent;
  const Eigen::Vector2d u = z - s.linear_cost;
  Eigen::Vector2d a;
  for (int j = 0; j < 2; ++j) {
    const int i = other(j);
    a(j) = (s.quadratic_cost(i) * u(j) - s.congestion * u(i)) / q_m;
  }
  return a;
}

TechControls sb_controls_monopoly(const Eigen::Vector2d& z, const Eigen::Vector2d& gamma, const MarketSpec& spec,
                                  bool volatility_control) {
  TechControls c;
  c.a = monopoly_drift(z, spec);
  c.b = response_vol(gamma, spec, volatility_control, &c.interior);
  return c;
}

Eigen::Vector2d monopoly_payment_closed_form(const Eigen::Vector2d& wP, const Eigen::Vector2d& b,
                                             const MarketSpec& spec, double energy_scale) {
  const auto coef = monopoly_coefficients(b, spec, energy_scale);
  const auto& q = spec.agent.quadratic_cost;
  const double etaP = energy_scale * spec.principal.risk_aversion;
  const double etaA = energy_scale * spec.agent.monopolist_risk_aversion;
  const double c = spec.agent.congestion / coef.q_m;
  Eigen::Vector2d z;
  for (int j = 0; j < 2; ++j) {
    const int i = other(j);
    const double zi = coef.zeta(i);
    const double denom = coef.zeta(j) - c * c / zi;
    const double own = b(j) * b(j) * etaP + q(i) / coef.q_m - c * c / zi;
    z(j) = wP(j) * own / denom - wP(i) * c * b(i) * b(i) * etaA / (zi * denom);
  }
  return z;
}

Eigen::Vector2d monopoly_m_hat(const Eigen::Vector2d& z, const Eigen::Vector2d& wP, const MarketSpec& spec,
                               double energy_scale) {
  const double etaP = energy_scale * spec.principal.risk_aversion;
  const double etaA = energy_scale * spec.agent.monopolist_risk_aversion;
  return (-spec.principal.vol_penalty - etaA * z.array().square() - etaP * (wP - z).array().square()).matrix();
}

PaymentSchedule sb_payments_monopoly(const TimeGrid& grid, const MarketSpec& spec, const SolveOptions& opt) {
  spec.validate(Market::monopoly);
  const double kappa = grid.energy_scale();
  const Eigen::MatrixXd W = principal_marginal_revenue(grid, spec);
  const int rows = grid.size();
  PaymentSchedule s;
  s.agents = 1;
  s.dim = 2;
  s.volatility_control = opt.volatility_control;
  s.times = grid.times();
  s.z.resize(rows, 2);
  s.gamma.resize(rows, 2);
  s.vol.resize(rows, 2);
  s.w_principal = W;
  s.iterations.resize(rows);
  s.residual.resize(rows);
  s.method = "monopoly closed form";

  const double etaP = kappa * spec.principal.risk_aversion;
  const double etaA = kappa * spec.agent.monopolist_risk_aversion;
  Eigen::Vector2d warm;
  for (int i = rows - 1; i >= 0; --i) {
    const Eigen::Vector2d wP = W.row(i).transpose();
    Eigen::Vector2d z, gamma, b;
    if (!opt.volatility_control) {
      b = spec.agent.uncontrolled_vol;
      z = monopoly_payment_closed_form(wP, b, spec, kappa);
      gamma = monopoly_m_hat(z, wP, spec, kappa);
      s.iterations(i) = 1;
      s.residual(i) = 0.0;
    } else {
      Eigen::Vector2d gamma0 = warm;
      if (i == rows - 1) {
        const double share = etaP / (etaP + etaA);
        gamma0 = monopoly_m_hat(share * wP, wP, spec, kappa);
      }
      auto G = [&](const Eigen::Vector2d& g) -> Eigen::Vector2d {
        b = response_vol(g, spec, true);
        z = monopoly_payment_closed_form(wP, b, spec, kappa);
        return monopoly_m_hat(z, wP, spec, kappa);
      };
      const auto res = damped_picard(gamma0, G, opt.picard);
      gamma = res.x;
      s.iterations(i) = res.iterations;
      s.residual(i) = res.residual;
    }
    warm = gamma;
    s.z.row(i) = z.transpose();
    s.gamma.row(i) = gamma.transpose();
    s.vol.row(i) = b.transpose();
  }
  return s;
}

double monopoly_system_residual(const PaymentSchedule& s, const MarketSpec& spec, const TimeGrid& grid) {
  const double kappa = grid.energy_scale();
  double r = 0.0;
  for (int i = 0; i < s.rows(); ++i) {
    const Eigen::Vector2d z = s.z.row(i).transpose();
    const Eigen::Vector2d gamma = s.gamma.row(i).transpose();
    const Eigen::Vector2d wP = s.w_principal.row(i).transpose();
    const Eigen::Vector2d b = response_vol(gamma, spec, s.volatility_control);
    r = std::max(r, relative_residual(monopoly_payment_closed_form(wP, b, spec, kappa), z));
    r = std::max(r, relative_residual(monopoly_m_hat(z, wP, spec, kappa), gamma));
  }
  return r;
}

ContractPrices contract_prices_monopoly(const PaymentSchedule& s, const MarketSpec& spec, const TimeGrid& grid,
                                        RateMode mode) {
  if (grid.steps() < 4) throw DomainError("contract_prices_monopoly: grid too coarse");
  if (s.rows() != grid.size()) throw DomainError("contract_prices_monopoly: schedule does not match grid");
  const auto& a = spec.agent;
  const double p = spec.principal.power_price, h = spec.principal.vol_penalty;
  const double kappa = grid.energy_scale();
  const double etaP = kappa * spec.principal.risk_aversion;
  const double T = grid.horizon();

  Eigen::MatrixXd zdot;
  if (mode == RateMode::finite_difference) {
    zdot = time_derivative(s.z, grid.dt());
  } else {
    // z = C(b) w with C held fixed; differentiate w only.
    zdot.resize(s.rows(), 2);
    for (int i = 0; i < s.rows(); ++i) {
      const Eigen::Vector2d b = s.vol.row(i).transpose();
      Eigen::Vector2d wdot;
      for (int j = 0; j < 2; ++j)
        wdot(j) = w_closed_form_rate(grid.time(i), spec.principal.externality(j), a.depreciation(j), T);
      zdot.row(i) = monopoly_payment_closed_form(wdot, b, spec, kappa).transpose();
    }
  }

  ContractPrices out;
  out.times = s.times;
  out.baseline = spec.initial_state;
  out.energy_scale = kappa;
  FirmPrices f;
  f.drift.resize(s.rows(), 2);
  f.vol.resize(s.rows(), 2);
  Eigen::VectorXd H(s.rows());
  for (int i = 0; i < s.rows(); ++i) {
    const Eigen::Vector2d z = s.z.row(i).transpose();
    const Eigen::Vector2d wP = s.w_principal.row(i).transpose();
    for (int j = 0; j < 2; ++j) {
      f.drift(i, j) = -zdot(i, j) - p + a.depreciation(j) * z(j);
      f.vol(i, j) = -h - etaP * (wP(j) - z(j)) * (wP(j) - z(j));
    }
    const Eigen::Vector2d gamma = s.gamma.row(i).transpose();
    const Eigen::Vector2d ctrl = monopoly_drift(z, spec);
    const Eigen::Vector2d b = s.vol.row(i).transpose();
    H(i) = hamiltonian_agent(spec.initial_state, z, Eigen::Matrix2d(gamma.asDiagonal()), ctrl, b, spec, -1);
  }
  f.fixed = a.monopolist_reservation - kappa * trapezoid(H, grid.dt());
  f.terminal_bonus = s.z.row(s.rows() - 1).transpose();
  out.firms.push_back(f);
  return out;
}

ControlSchedule bu_schedule_monopoly(const TimeGrid& grid, const MarketSpec& spec, bool volatility_control) {
  ControlSchedule c;
  c.times = grid.times();
  c.a.resize(grid.size(), 2);
  c.b.resize(grid.size(), 2);
  for (int i = 0; i < grid.size(); ++i) {
    const auto u = bu_controls_monopoly(grid.time(i), spec, grid.energy_scale(), volatility_control);
    c.a.row(i) = u.a.transpose();
    c.b.row(i) = u.b.transpose();
  }
  c.tag = volatility_control ? "M-BU-DVC" : "M-BU-DC";
  return c;
}

ControlSchedule sb_schedule_monopoly(const PaymentSchedule& s, const MarketSpec& spec) {
  ControlSchedule c;
  c.times = s.times;
  c.a.resize(s.rows(), 2);
  c.b = s.vol;
  for (int i = 0; i < s.rows(); ++i) c.a.row(i) = monopoly_drift(s.z.row(i).transpose(), spec).transpose();
  c.tag = s.volatility_control ? "M-SB-DVC" : "M-SB-DC";
  return c;
}

ValueSummary agent_value_bu_monopoly(const TimeGrid& grid, const MarketSpec& spec, bool volatility_control) {
  const auto& s = spec.agent;
  const double kappa = grid.energy_scale();
  const double eta = kappa * s.monopolist_risk_aversion;
  const Eigen::MatrixXd W = agent_marginal_revenue(grid, spec);
  ValueSummary v;
  v.w0.resize(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const auto u = bu_controls_monopoly(grid.time(i), spec, kappa, volatility_control);
    double acc = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double w = W(i, j);
      acc += w * u.a(j) - 0.5 * eta * u.b(j) * u.b(j) * w * w - drift_cost(j, u.a, s) -
             vol_cost(u.b(j), s.vol_cost_scale(j), s.uncontrolled_vol(j));
    }
    v.w0(i) = acc;
  }
  v.value = kappa * (W.row(0).dot(spec.initial_state) + trapezoid(v.w0, grid.dt()));
  return v;
}

ValueSummary principal_value_sb_monopoly(const PaymentSchedule& s, const MarketSpec& spec, const TimeGrid& grid) {
  const auto& a = spec.agent;
  const double kappa = grid.energy_scale();
  ValueSummary v;
  v.w0.resize(s.rows());
  for (int i = 0; i < s.rows(); ++i) {
    const Eigen::Vector2d z = s.z.row(i).transpose();
    const Eigen::Vector2d wP = s.w_principal.row(i).transpose();
    const Eigen::Vector2d ctrl = monopoly_drift(z, spec);
    const Eigen::Vector2d m = monopoly_m_hat(z, wP, spec, kappa);
    double acc = wP.dot(ctrl);
    for (int j = 0; j < 2; ++j) {
      acc -= drift_cost(j, ctrl, a);
      acc += s.volatility_control
                 ? phi_star(m(j), a.vol_cost_scale(j), a.uncontrolled_vol(j), spec.vol_floor_ratio)
                 : 0.5 * a.uncontrolled_vol(j) * a.uncontrolled_vol(j) * m(j);
    }
    v.w0(i) = acc;
  }
  v.value = -a.monopolist_reservation +
            kappa * (s.w_principal.row(0).dot(spec.initial_state) + trapezoid(v.w0, grid.dt()));
  return v;
}

}  // namespace incentive
