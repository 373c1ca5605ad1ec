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

#include "incentive/duopoly.hpp"

#include <cmath>

#include "incentive/general_lq.hpp"

namespace incentive {

namespace {

inline int other(int j) { return 1 - j; }

double checked_q_c(const MarketSpec& spec) {
  const double q = spec.q_competitive();
  if (q == 0.0) throw DegenerateModelError("duopoly: q1 q2 - eps^2/4 vanishes", INFINITY);
  return q;
}

Eigen::Vector2d response_vol(const Eigen::Vector2d& gamma, const MarketSpec& spec, bool volatility_control,
                             std::array<bool, 2>* interior = nullptr) {
  const auto& s = spec.agent;
  Eigen::Vector2d b = s.uncontrolled_vol;
  if (!volatility_control) return b;
  for (int j = 0; j < 2; ++j) {
    const auto r = vol_best_response(gamma(j), s.vol_cost_scale(j), s.uncontrolled_vol(j), spec.vol_floor_ratio);
    b(j) = r.b;
    if (interior) (*interior)[j] = r.interior;
  }
  return b;
}

// Shared pieces of both coefficient sets: Q_C, E, K.
DuopolyCoefficients base_coefficients(const MarketSpec& spec) {
  const auto& s = spec.agent;
  const double qc = checked_q_c(spec);
  const double eps = s.congestion;
  DuopolyCoefficients c;
  c.q_c = qc;
  c.cal_e = eps * eps * eps / (4 * qc * qc);
  for (int j = 0; j < 2; ++j) {
    const int i = other(j);
    c.K(j) = -s.linear_cost(j) * s.quadratic_cost(i) * eps * eps / (2 * qc * qc) +
             s.linear_cost(i) * (eps / (2 * qc) + c.cal_e);
  }
  return c;
}

void finish(DuopolyCoefficients& c) {
  c.denom = c.zeta(0) * c.zeta(1) - c.cal_e * c.cal_e;
  if (c.denom == 0.0 || !std::isfinite(c.denom))
    throw DegenerateSystemError("duopoly: zeta_1 zeta_2 - E^2 vanishes", INFINITY);
}

Payments4 payments_from(const DuopolyCoefficients& c, const Eigen::Vector2d& wP, const Eigen::Vector2d& share) {
  Payments4 z;
  for (int j = 0; j < 2; ++j) {
    const int i = other(j);
    const double own = c.zeta(i) / c.denom * (wP(j) * c.F_own(j) - wP(i) * c.F_cross(j) + c.F_const(j));
    z(payment_index(j, j)) = own;
    z(payment_index(i, j)) = share(i) * (wP(j) - own);
  }
  return z;
}

}  // namespace

DuopolyCoefficients duopoly_coefficients(const Eigen::Vector2d& b, const MarketSpec& spec, double energy_scale) {
  const auto& s = spec.agent;
  DuopolyCoefficients c = base_coefficients(spec);
  const double qc = c.q_c, eps = s.congestion;
  const double etaP = energy_scale * spec.principal.risk_aversion;
  const Eigen::Vector2d eta = energy_scale * s.competitor_risk_aversion;
  // eta_P eta_i / (eta_P + eta_i)
  const Eigen::Vector2d shared = (etaP * eta.array() / (etaP + eta.array())).matrix();
  for (int j = 0; j < 2; ++j) {
    const int i = other(j);
    c.zeta(j) = b(j) * b(j) * (eta(j) + shared(i)) + s.quadratic_cost(i) / qc * (1 - eps * eps / (2 * qc));
  }
  for (int j = 0; j < 2; ++j) {
    const int i = other(j);
    const double ratio = c.cal_e / c.zeta(i);
    c.F_own(j) = b(j) * b(j) * shared(i) + s.quadratic_cost(i) / qc + eps / (2 * qc) * ratio;
    c.F_cross(j) = eps / (2 * qc) + ratio * (b(i) * b(i) * shared(j) + s.quadratic_cost(j) / qc);
    c.F_const(j) = c.K(j) - c.K(i) * ratio;
  }
  finish(c);
  return c;
}

DuopolyCoefficients duopoly_first_best_coefficients(const MarketSpec& spec) {
  const auto& s = spec.agent;
  DuopolyCoefficients c = base_coefficients(spec);
  const double qc = c.q_c, eps = s.congestion;
  for (int j = 0; j < 2; ++j) c.zeta(j) = s.quadratic_cost(other(j)) / qc * (1 - eps * eps / (2 * qc));
  for (int j = 0; j < 2; ++j) {
    const int i = other(j);
    const double ratio = c.cal_e / c.zeta(i);
    c.F_own(j) = s.quadratic_cost(i) / qc + ratio * eps / (2 * qc);
    c.F_cross(j) = eps / (2 * qc) + ratio * s.quadratic_cost(j) / qc;
    c.F_const(j) = c.K(j) - c.K(i) * ratio;
  }
  finish(c);
  return c;
}

TechControls bu_controls_competitive(double t, const MarketSpec& spec, double energy_scale, bool volatility_control) {
  const auto& s = spec.agent;
  Eigen::Vector2d w;
  for (int j = 0; j < 2; ++j)
    w(j) = w_agent_closed_form(t, spec.principal.power_price, s.depreciation(j), spec.principal.horizon);
  TechControls c;
  c.a = competitive_drift(w, spec);
  const Eigen::Vector2d gamma = -(energy_scale * s.competitor_risk_aversion).cwiseProduct(w.cwiseAbs2());
  c.b = response_vol(gamma, spec, volatility_control, &c.interior);
  return c;
}

Eigen::Vector2d competitive_drift(const Eigen::Vector2d& own, const MarketSpec& spec) {
  const double qc = checked_q_c(spec);
  const auto& s = spec.agent;
  const Eigen::Vector2d u = own - s.linear_cost;
  Eigen::Vector2d a;
  for (int n = 0; n < 2; ++n) {
    const int i = other(n);
    a(n) = (s.quadratic_cost(i) * u(n) - 0.5 * s.congestion * u(i)) / qc;
  }
  return a;
}

double individual_response(int n, double a_other, double own_payment, const MarketSpec& spec) {
  const auto& s = spec.agent;
  return (own_payment - s.linear_cost(n) - 0.5 * s.congestion * a_other) / s.quadratic_cost(n);
}

TechControls sb_controls_competitive(const Eigen::Vector2d& own, const Eigen::Vector2d& gamma, const MarketSpec& spec,
                                     bool volatility_control) {
  TechControls c;
  c.a = competitive_drift(own, spec);
  c.b = response_vol(gamma, spec, volatility_control, &c.interior);
  return c;
}

Eigen::Vector2d own_payments(const Payments4& z) {
  return {z(payment_index(0, 0)), z(payment_index(1, 1))};
}

Payments4 duopoly_payment_closed_form(const Eigen::Vector2d& wP, const Eigen::Vector2d& b, const MarketSpec& spec,
                                      double energy_scale) {
  const auto c = duopoly_coefficients(b, spec, energy_scale);
  const double etaP = energy_scale * spec.principal.risk_aversion;
  const Eigen::Vector2d eta = energy_scale * spec.agent.competitor_risk_aversion;
  const Eigen::Vector2d share = (etaP / (etaP + eta.array())).matrix();
  return payments_from(c, wP, share);
}

Payments4 duopoly_first_best_payments(const Eigen::Vector2d& wP, const MarketSpec& spec) {
  const auto c = duopoly_first_best_coefficients(spec);
  Payments4 z;
  for (int n = 0; n < 2; ++n) {
    const int j = other(n);
    const double cross = wP(n) * (1 - c.zeta(j) * c.F_own(n) / c.denom) +
                         (wP(j) * c.F_cross(n) - c.F_const(n)) * c.zeta(j) / c.denom;
    z(payment_index(j, n)) = cross;
    z(payment_index(n, n)) = wP(n) - cross;
  }
  return z;
}

Eigen::Vector2d duopoly_m_hat(const Payments4& z, const Eigen::Vector2d& wP, const MarketSpec& spec,
                              double energy_scale) {
  const double etaP = energy_scale * spec.principal.risk_aversion;
  const Eigen::Vector2d eta = energy_scale * spec.agent.competitor_risk_aversion;
  Eigen::Vector2d m;
  for (int j = 0; j < 2; ++j) {
    const double z1 = z(payment_index(0, j)), z2 = z(payment_index(1, j));
    const double gap = wP(j) - z1 - z2;
    m(j) = -spec.principal.vol_penalty - eta(0) * z1 * z1 - eta(1) * z2 * z2 - etaP * gap * gap;
  }
  return m;
}

namespace {

PaymentSchedule empty_schedule(const TimeGrid& grid, const Eigen::MatrixXd& W, bool volatility_control) {
  PaymentSchedule s;
  s.agents = 2;
  s.dim = 2;
  s.volatility_control = volatility_control;
  s.times = grid.times();
  s.z.resize(grid.size(), 4);
  s.gamma.resize(grid.size(), 2);
  s.vol.resize(grid.size(), 2);
  s.w_principal = W;
  s.iterations.resize(grid.size());
  s.residual.resize(grid.size());
  return s;
}

}  // namespace

PaymentSchedule sb_payments_competitive(const TimeGrid& grid, const MarketSpec& spec, const SolveOptions& opt) {
  spec.validate(Market::duopoly);
  const double kappa = grid.energy_scale();
  const Eigen::MatrixXd W = principal_marginal_revenue(grid, spec);
  PaymentSchedule s = empty_schedule(grid, W, opt.volatility_control);
  s.method = "duopoly closed form";
  const double etaP = kappa * spec.principal.risk_aversion;
  const Eigen::Vector2d eta = kappa * spec.agent.competitor_risk_aversion;

  Eigen::Vector2d warm;
  for (int i = grid.size() - 1; i >= 0; --i) {
    const Eigen::Vector2d wP = W.row(i).transpose();
    Payments4 z;
    Eigen::Vector2d b, gamma;
    if (!opt.volatility_control) {
      b = spec.agent.uncontrolled_vol;
      z = duopoly_payment_closed_form(wP, b, spec, kappa);
      gamma = duopoly_m_hat(z, wP, spec, kappa);
      s.iterations(i) = 1;
      s.residual(i) = 0.0;
    } else {
      Eigen::Vector2d gamma0 = warm;
      if (i == grid.size() - 1) {
        Payments4 z0 = Payments4::Zero();
        for (int j = 0; j < 2; ++j) z0(payment_index(j, j)) = etaP / (etaP + eta(j)) * wP(j);
        gamma0 = duopoly_m_hat(z0, wP, spec, kappa);
      }
      auto G = [&](const Eigen::Vector2d& g) -> Eigen::Vector2d {
        b = response_vol(g, spec, true);
        z = duopoly_payment_closed_form(wP, b, spec, kappa);
        return duopoly_m_hat(z, wP, spec, kappa);
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

PaymentSchedule fb_payments_competitive(const TimeGrid& grid, const MarketSpec& spec, bool volatility_control) {
  spec.validate(Market::duopoly);
  MarketSpec neutral = spec;
  neutral.agent.competitor_risk_aversion.setZero();
  const double kappa = grid.energy_scale();
  const Eigen::MatrixXd W = principal_marginal_revenue(grid, spec);
  PaymentSchedule s = empty_schedule(grid, W, volatility_control);
  s.method = "duopoly first-best constant coefficients";
  for (int i = 0; i < grid.size(); ++i) {
    const Eigen::Vector2d wP = W.row(i).transpose();
    const Payments4 z = duopoly_first_best_payments(wP, neutral);
    const Eigen::Vector2d gamma = duopoly_m_hat(z, wP, neutral, kappa);
    s.z.row(i) = z.transpose();
    s.gamma.row(i) = gamma.transpose();
    s.vol.row(i) = response_vol(gamma, spec, volatility_control).transpose();
    s.iterations(i) = 0;
    s.residual(i) = 0.0;
  }
  return s;
}

double duopoly_system_residual(const PaymentSchedule& s, const MarketSpec& spec, const TimeGrid& grid) {
  const double kappa = grid.energy_scale();
  double r = 0.0;
  for (int i = 0; i < s.rows(); ++i) {
    const Payments4 z = s.z.row(i).transpose();
    const Eigen::Vector2d gamma = s.gamma.row(i).transpose();
    const Eigen::Vector2d wP = s.w_principal.row(i).transpose();
    const Eigen::Vector2d b = response_vol(gamma, spec, s.volatility_control);
    r = std::max(r, relative_residual(duopoly_payment_closed_form(wP, b, spec, kappa), z));
    r = std::max(r, relative_residual(duopoly_m_hat(z, wP, spec, kappa), gamma));
  }
  return r;
}

ContractPrices contract_prices_competitive(const PaymentSchedule& s, const MarketSpec& spec, const TimeGrid& grid,
                                           RateMode mode) {
  if (grid.steps() < 4) throw DomainError("contract_prices_competitive: grid too coarse");
  if (s.rows() != grid.size() || s.agents != 2) throw DomainError("contract_prices_competitive: schedule mismatch");
  const auto& a = spec.agent;
  const double p = spec.principal.power_price, h = spec.principal.vol_penalty;
  const double kappa = grid.energy_scale();
  const double etaP = kappa * spec.principal.risk_aversion;
  const Eigen::Vector2d eta = kappa * a.competitor_risk_aversion;
  const double T = grid.horizon();

  Eigen::MatrixXd zdot;
  if (mode == RateMode::finite_difference) {
    zdot = time_derivative(s.z, grid.dt());
  } else {
    // Payments are affine in w with coefficients frozen at the current b.
    zdot.resize(s.rows(), 4);
    for (int i = 0; i < s.rows(); ++i) {
      const Eigen::Vector2d b = s.vol.row(i).transpose();
      Eigen::Vector2d wdot;
      for (int j = 0; j < 2; ++j)
        wdot(j) = w_closed_form_rate(grid.time(i), spec.principal.externality(j), a.depreciation(j), T);
      const Eigen::Vector2d zero = Eigen::Vector2d::Zero();
      zdot.row(i) = (duopoly_payment_closed_form(wdot, b, spec, kappa) -
                     duopoly_payment_closed_form(zero, b, spec, kappa)).transpose();
    }
  }

  ContractPrices out;
  out.times = s.times;
  out.baseline = spec.initial_state;
  out.energy_scale = kappa;
  for (int n = 0; n < 2; ++n) {
    FirmPrices f;
    f.drift.resize(s.rows(), 2);
    f.vol.resize(s.rows(), 2);
    Eigen::VectorXd H(s.rows());
    for (int r = 0; r < s.rows(); ++r) {
      const Payments4 z = s.z.row(r).transpose();
      const Eigen::Vector2d wP = s.w_principal.row(r).transpose();
      for (int j = 0; j < 2; ++j) {
        const double znj = z(payment_index(n, j));
        f.drift(r, j) = -zdot(r, payment_index(n, j)) + a.depreciation(j) * znj - (j == n ? p : 0.0);
        if (j == n) {
          const int i = other(n);
          const double zin = z(payment_index(i, n));
          const double gap = wP(n) - z(payment_index(0, n)) - z(payment_index(1, n));
          f.vol(r, j) = -h - eta(i) * zin * zin - etaP * gap * gap;
        } else {
          f.vol(r, j) = eta(n) * znj * znj;
        }
      }
      Eigen::Matrix2d gamma_n = Eigen::Matrix2d::Zero();
      gamma_n(n, n) = s.gamma(r, n);
      const Eigen::Vector2d zn(z(payment_index(n, 0)), z(payment_index(n, 1)));
      const Eigen::Vector2d ctrl = competitive_drift(own_payments(z), spec);
      const Eigen::Vector2d b = s.vol.row(r).transpose();
      H(r) = hamiltonian_agent(spec.initial_state, zn, gamma_n, ctrl, b, spec, n);
    }
    f.fixed = a.competitor_reservation(n) - kappa * trapezoid(H, grid.dt());
    const int last = s.rows() - 1;
    f.terminal_bonus = Eigen::Vector2d(s.z(last, payment_index(n, 0)), s.z(last, payment_index(n, 1)));
    out.firms.push_back(f);
  }
  return out;
}

ControlSchedule bu_schedule_competitive(const TimeGrid& grid, const MarketSpec& spec, bool volatility_control) {
  ControlSchedule c;
  c.times = grid.times();
  c.a.resize(grid.size(), 2);
  c.b.resize(grid.size(), 2);
  for (int i = 0; i < grid.size(); ++i) {
    const auto u = bu_controls_competitive(grid.time(i), spec, grid.energy_scale(), volatility_control);
    c.a.row(i) = u.a.transpose();
    c.b.row(i) = u.b.transpose();
  }
  c.tag = volatility_control ? "C-BU-DVC" : "C-BU-DC";
  return c;
}

ControlSchedule sb_schedule_competitive(const PaymentSchedule& s, const MarketSpec& spec) {
  ControlSchedule c;
  c.times = s.times;
  c.a.resize(s.rows(), 2);
  c.b = s.vol;
  for (int i = 0; i < s.rows(); ++i) {
    const Payments4 z = s.z.row(i).transpose();
    c.a.row(i) = competitive_drift(own_payments(z), spec).transpose();
  }
  c.tag = s.volatility_control ? "C-SB-DVC" : "C-SB-DC";
  return c;
}

std::array<ValueSummary, 2> agent_values_bu_competitive(const TimeGrid& grid, const MarketSpec& spec,
                                                        bool volatility_control) {
  const auto& s = spec.agent;
  const double kappa = grid.energy_scale();
  const Eigen::MatrixXd W = agent_marginal_revenue(grid, spec);
  std::array<ValueSummary, 2> out;
  for (auto& v : out) v.w0.resize(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const auto u = bu_controls_competitive(grid.time(i), spec, kappa, volatility_control);
    for (int n = 0; n < 2; ++n) {
      const double w = W(i, n), eta = kappa * s.competitor_risk_aversion(n);
      out[n].w0(i) = w * u.a(n) - 0.5 * eta * u.b(n) * u.b(n) * w * w - drift_cost(n, u.a, s) -
                     vol_cost(u.b(n), s.vol_cost_scale(n), s.uncontrolled_vol(n));
    }
  }
  for (int n = 0; n < 2; ++n)
    out[n].value = kappa * (W(0, n) * spec.initial_state(n) + trapezoid(out[n].w0, grid.dt()));
  return out;
}

ValueSummary principal_value_sb_competitive(const PaymentSchedule& s, const MarketSpec& spec, const TimeGrid& grid) {
  const auto& a = spec.agent;
  const double kappa = grid.energy_scale();
  ValueSummary v;
  v.w0.resize(s.rows());
  for (int i = 0; i < s.rows(); ++i) {
    const Payments4 z = s.z.row(i).transpose();
    const Eigen::Vector2d wP = s.w_principal.row(i).transpose();
    const Eigen::Vector2d ctrl = competitive_drift(own_payments(z), spec);
    const Eigen::Vector2d m = duopoly_m_hat(z, wP, spec, kappa);
    double acc = wP.dot(ctrl);
    for (int j = 0; j < 2; ++j) {
      acc -= drift_cost(j, ctrl, a);
      acc += s.volatility_control
                 ? phi_star(m(j), a.vol_cost_scale(j), a.uncontrolled_vol(j), spec.vol_floor_ratio)
                 : 0.5 * a.uncontrolled_vol(j) * a.uncontrolled_vol(j) * m(j);
    }
    v.w0(i) = acc;
  }
  v.value = -a.competitor_reservation.sum() +
            kappa * (s.w_principal.row(0).dot(spec.initial_state) + trapezoid(v.w0, grid.dt()));
  return v;
}

}  // namespace incentive
