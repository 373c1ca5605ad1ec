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

#include <gtest/gtest.h>

#include "incentive/duopoly.hpp"
#include "incentive/monopoly.hpp"
#include "incentive/rng.hpp"
#include "incentive/simulator.hpp"

namespace incentive {
namespace {

const TimeGrid& reference_grid() {
  static const TimeGrid grid(10.0, 1.0 / 52.0);
  return grid;
}

ControlSchedule constant_schedule(const TimeGrid& grid, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  ControlSchedule s;
  s.times = grid.times();
  s.a = a.transpose().replicate(grid.size(), 1);
  s.b = b.transpose().replicate(grid.size(), 1);
  s.tag = "test";
  return s;
}

TEST(Philox, KnownAnswers) {
  const auto z = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(z[0], 0x6627e8d5u);
  EXPECT_EQ(z[1], 0xe169c58du);
  EXPECT_EQ(z[2], 0xbc57ac4cu);
  EXPECT_EQ(z[3], 0x9b00dbd8u);
  const std::uint32_t f = 0xffffffffu;
  const auto o = Philox4x32::block({f, f, f, f}, {f, f});
  EXPECT_EQ(o[0], 0x408f276du);
  EXPECT_EQ(o[1], 0x41c83b0eu);
  EXPECT_EQ(o[2], 0xa20bc7c6u);
  EXPECT_EQ(o[3], 0x6d5451fdu);
}

TEST(Philox, UnitIntervalExcludesZero) {
  EXPECT_GT(to_unit(0, 0), 0.0);
  EXPECT_LE(to_unit(0xffffffffu, 0xffffffffu), 1.0);
}

TEST(Philox, NormalsHaveUnitMoments) {
  const int n = 200000;
  double s = 0, s2 = 0, c = 0;
  for (int k = 0; k < n / 2; ++k) {
    const auto [a, b] = normal_pair(3, k, 0);
    s += a + b;
    s2 += a * a + b * b;
    c += a * b;
  }
  EXPECT_NEAR(s / n, 0.0, 4 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 4 * std::sqrt(2.0 / n));
  EXPECT_NEAR(c / (n / 2), 0.0, 4 / std::sqrt(n / 2.0));
}

TEST(Paths, FrozenWithoutControls) {
  const auto s = constant_schedule(reference_grid(), Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero());
  const auto p = simulate_paths(s, Eigen::Vector2d(4000, 1000), Eigen::Vector2d::Zero(), reference_grid(), 5, 1);
  EXPECT_TRUE((p.x1.array() == 4000.0).all());
  EXPECT_TRUE((p.x2.array() == 1000.0).all());
}

TEST(Paths, ConstantDriftIsLinear) {
  const auto s = constant_schedule(reference_grid(), Eigen::Vector2d(300, -75), Eigen::Vector2d::Zero());
  const auto p = simulate_paths(s, Eigen::Vector2d(4000, 1000), Eigen::Vector2d::Zero(), reference_grid(), 3, 1);
  const int T = reference_grid().steps();
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(p.x1(k, T), 4000 + 300 * 10.0, 1e-9);
    EXPECT_NEAR(p.x2(k, T), 1000 - 75 * 10.0, 1e-9);
  }
}

TEST(Paths, StartAtInitialState) {
  const MarketSpec spec;
  const auto s = bu_schedule_monopoly(reference_grid(), spec);
  const auto p = simulate_paths(s, spec.initial_state, spec.agent.depreciation, reference_grid(), 50, 9);
  EXPECT_TRUE((p.x1.col(0).array() == 4000.0).all());
  EXPECT_TRUE((p.x2.col(0).array() == 1000.0).all());
  EXPECT_EQ(p.x1.cols(), 521);
  EXPECT_EQ(p.qv1.cols(), 520);
}

TEST(Paths, RejectsBadInput) {
  const auto s = constant_schedule(reference_grid(), Eigen::Vector2d::Zero(), Eigen::Vector2d(1, 1));
  EXPECT_THROW(simulate_paths(s, Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), reference_grid(), 0, 1),
               DomainError);
  const auto other = constant_schedule(TimeGrid(10.0, 0.1), Eigen::Vector2d::Zero(), Eigen::Vector2d(1, 1));
  EXPECT_THROW(simulate_paths(other, Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), reference_grid(), 5, 1),
               DomainError);
}

TEST(Paths, IdenticalUnderAnyThreadCount) {
  const MarketSpec spec;
  const auto s = sb_schedule_monopoly(sb_payments_monopoly(reference_grid(), spec), spec);
  SimulationOptions one, many;
  one.threads = 1;
  many.threads = 3;
  const auto a = simulate_paths(s, spec.initial_state, spec.agent.depreciation, reference_grid(), 101, 42, one);
  const auto b = simulate_paths(s, spec.initial_state, spec.agent.depreciation, reference_grid(), 101, 42, many);
  EXPECT_TRUE((a.x1.array() == b.x1.array()).all());
  EXPECT_TRUE((a.x2.array() == b.x2.array()).all());
  const Eigen::MatrixXd t = simulate_terminal(s, spec.initial_state, spec.agent.depreciation, reference_grid(),
                                              101, 42, many);
  EXPECT_TRUE((t.col(0).array() == a.x1.col(520).array()).all());
  EXPECT_TRUE((t.col(1).array() == a.x2.col(520).array()).all());
}

TEST(Paths, OrnsteinUhlenbeckMoments) {
  const Eigen::Vector2d a(300, 500), b(300, 750), delta(0.1, 0.05), x0(4000, 1000);
  const auto s = constant_schedule(reference_grid(), a, b);
  const int n = 100000;
  const Eigen::MatrixXd X = simulate_terminal(s, x0, delta, reference_grid(), n, 2024);
  const double T = 10.0;
  for (int j = 0; j < 2; ++j) {
    const double e = std::exp(-delta(j) * T);
    const double mean = x0(j) * e + a(j) / delta(j) * (1 - e);
    const double var = b(j) * b(j) * (1 - e * e) / (2 * delta(j));
    const Eigen::ArrayXd c = X.col(j).array();
    const double m = c.mean();
    const double v = (c - m).square().sum() / (n - 1);
    const double m4 = (c - m).pow(4).mean();
    EXPECT_LE(std::abs(m - mean), 3 * std::sqrt(v / n)) << j;
    EXPECT_LE(std::abs(v - var), 3 * std::sqrt((m4 - v * v) / n)) << j;
  }
}

TEST(Paths, MeanFollowsDriftOde) {
  MarketSpec spec;
  spec.agent.depreciation = {0.05, 0.1};
  const TimeGrid& grid = reference_grid();
  const auto s = sb_schedule_monopoly(sb_payments_monopoly(grid, spec), spec);
  const int n = 4000;
  const auto p = simulate_paths(s, spec.initial_state, spec.agent.depreciation, grid, n, 42);
  Eigen::Vector2d x = spec.initial_state;
  for (int i = 0; i < grid.size(); ++i) {
    for (int j = 0; j < 2; ++j) {
      const Eigen::VectorXd c = j == 0 ? p.x1.col(i) : p.x2.col(i);
      const double m = c.mean();
      const double se = std::sqrt((c.array() - m).square().sum() / (n - 1) / n);
      ASSERT_LE(std::abs(m - x(j)), 3 * se + 1e-9 * std::abs(x(j))) << "row " << i << " tech " << j;
    }
    if (i < grid.steps()) x += (s.a.row(i).transpose() - spec.agent.depreciation.cwiseProduct(x)) * grid.dt();
  }
}

TEST(Paths, SquaredIncrementsEstimateVariance) {
  const Eigen::Vector2d b(300, 750);
  const auto s = constant_schedule(reference_grid(), Eigen::Vector2d(10, 10), b);
  SimulationOptions opt;
  opt.squared_increments = true;
  const auto p = simulate_paths(s, Eigen::Vector2d(4000, 1000), Eigen::Vector2d::Zero(), reference_grid(), 500, 5,
                                opt);
  const auto m = scenario_metrics(p, reference_grid());
  EXPECT_NEAR(m.qv_rate(0), b(0) * b(0), 0.02 * b(0) * b(0));
  EXPECT_NEAR(m.qv_rate(1), b(1) * b(1), 0.02 * b(1) * b(1));
}

TEST(Contract, FrozenPathPaysFixedPart) {
  const MarketSpec spec;
  const TimeGrid& grid = reference_grid();
  const auto pr = contract_prices_monopoly(sb_payments_monopoly(grid, spec), spec, grid);
  const auto s = constant_schedule(grid, Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero());
  const auto p = simulate_paths(s, spec.initial_state, Eigen::Vector2d::Zero(), grid, 4, 1);
  const auto v = evaluate_contract(p, pr, grid);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(v.total(k, 0), pr.firms[0].fixed);
}

TEST(Contract, StreamedMatchesRecomputed) {
  const MarketSpec spec;
  const TimeGrid& grid = reference_grid();
  for (bool duo : {false, true}) {
    const auto pay = duo ? sb_payments_competitive(grid, spec) : sb_payments_monopoly(grid, spec);
    const auto pr = duo ? contract_prices_competitive(pay, spec, grid) : contract_prices_monopoly(pay, spec, grid);
    const auto s = duo ? sb_schedule_competitive(pay, spec) : sb_schedule_monopoly(pay, spec);
    const auto p = simulate_paths(s, spec.initial_state, spec.agent.depreciation, grid, 64, 8, {}, &pr);
    const auto v = evaluate_contract(p, pr, grid);
    ASSERT_EQ(p.streamed_contract.cols(), v.total.cols());
    for (int k = 0; k < 64; ++k)
      for (int f = 0; f < v.total.cols(); ++f)
        EXPECT_LE(std::abs(p.streamed_contract(k, f) - v.total(k, f)), 1e-10 * std::abs(v.total(k, f)));
  }
}

TEST(Contract, RejectsGridMismatch) {
  const MarketSpec spec;
  const TimeGrid coarse = TimeGrid::with_steps(10.0, 52);
  const auto pr = contract_prices_monopoly(sb_payments_monopoly(coarse, spec), spec, coarse);
  const auto s = constant_schedule(reference_grid(), Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero());
  const auto p = simulate_paths(s, spec.initial_state, Eigen::Vector2d::Zero(), reference_grid(), 2, 1);
  EXPECT_THROW(evaluate_contract(p, pr, reference_grid()), DomainError);
}

// With a risk-neutral monopolist and no depreciation the contract equals the
// externality value of new capacity, minus market revenue, plus the cost
// reimbursement, minus the agent's own payment rates and the volatility tax.
TEST(Contract, RiskNeutralRewrittenForm) {
  MarketSpec spec;
  spec.agent.monopolist_risk_aversion = 0;
  spec.agent.monopolist_reservation = 2.5e9;
  const TimeGrid& grid = reference_grid();
  const double kappa = grid.energy_scale(), dt = grid.dt(), p = spec.principal.power_price;
  const double h = spec.principal.vol_penalty;
  const auto pay = sb_payments_monopoly(grid, spec);
  const auto pr = contract_prices_monopoly(pay, spec, grid);
  const auto ctl = sb_schedule_monopoly(pay, spec);
  const auto paths = simulate_paths(ctl, spec.initial_state, Eigen::Vector2d::Zero(), grid, 20, 77);
  const auto v = evaluate_contract(paths, pr, grid);
  // Deterministic part with trapezoid weights.
  double det = 0;
  for (int i = 0; i < grid.size(); ++i) {
    const double wgt = (i == 0 || i == grid.steps()) ? 0.5 * dt : dt;
    double r = 0;
    for (int j = 0; j < 2; ++j) {
      const double a = ctl.a(i, j), b = ctl.b(i, j);
      r += drift_cost(j, ctl.a.row(i).transpose(), spec.agent) +
           vol_cost(b, spec.agent.vol_cost_scale(j), spec.agent.uncontrolled_vol(j));
      r -= pay.z(i, j) * a + 0.5 * b * b * pay.gamma(i, j);
    }
    det += wgt * (r - p * spec.initial_state.sum());
  }
  for (int k = 0; k < 20; ++k) {
    double path = 0;
    for (int i = 0; i < grid.steps(); ++i) {
      const Eigen::Vector2d x(paths.x1(k, i), paths.x2(k, i));
      const Eigen::Vector2d dx = x - spec.initial_state;
      path += (spec.principal.externality.dot(dx) - p * dx.sum()) * dt;
      path -= 0.5 * h * (paths.qv1(k, i) + paths.qv2(k, i));
    }
    const double oracle = spec.agent.monopolist_reservation + kappa * (det + path);
    EXPECT_LE(std::abs(v.total(k, 0) - oracle), 1e-6 * std::abs(oracle)) << k;
  }
}

TEST(Contract, SeparatedRiskNeutralDuopolySumsToMonopoly) {
  MarketSpec spec;
  spec.agent.congestion = 0;
  spec.agent.monopolist_risk_aversion = 0;
  spec.agent.competitor_risk_aversion = {0, 0};
  spec.agent.monopolist_reservation = 3e8;
  spec.agent.competitor_reservation = {1e8, 2e8};
  const TimeGrid& grid = reference_grid();
  const auto pm = sb_payments_monopoly(grid, spec);
  const auto pc = sb_payments_competitive(grid, spec);
  const auto prm = contract_prices_monopoly(pm, spec, grid);
  const auto prc = contract_prices_competitive(pc, spec, grid);
  const auto paths = simulate_paths(sb_schedule_monopoly(pm, spec), spec.initial_state, spec.agent.depreciation,
                                    grid, 30, 5);
  const auto vm = evaluate_contract(paths, prm, grid);
  const auto vc = evaluate_contract(paths, prc, grid);
  for (int k = 0; k < 30; ++k) {
    const double sum = vc.total(k, 0) + vc.total(k, 1);
    EXPECT_LE(std::abs(vm.total(k, 0) - sum), 1e-9 * std::abs(vm.total(k, 0))) << k;
  }
}

TEST(Metrics, EqualCapacitiesGiveHalfShare) {
  const auto s = constant_schedule(reference_grid(), Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero());
  const auto p = simulate_paths(s, Eigen::Vector2d(2500, 2500), Eigen::Vector2d::Zero(), reference_grid(), 1, 1);
  const auto m = scenario_metrics(p, reference_grid());
  EXPECT_TRUE((m.share.array() == 0.5).all());
  EXPECT_EQ(m.terminal_share, 0.5);
  EXPECT_EQ(m.pathwise_share, 0.5);
  EXPECT_EQ(m.terminal_total, 5000.0);
}

TEST(Metrics, QuantilesBracketMean) {
  const MarketSpec spec;
  const auto s = bu_schedule_competitive(reference_grid(), spec);
  const auto p = simulate_paths(s, spec.initial_state, spec.agent.depreciation, reference_grid(), 300, 3);
  const auto m = scenario_metrics(p, reference_grid());
  EXPECT_TRUE((m.q05.array() <= m.mean.array()).all());
  EXPECT_TRUE((m.mean.array() <= m.q95.array()).all());
  EXPECT_GT(m.terminal_share_se, 0.0);
}

TEST(Metrics, VolatilityIncentivesSmoothCapacity) {
  const MarketSpec spec;
  const TimeGrid& grid = reference_grid();
  for (bool duo : {false, true}) {
    Eigen::Vector2d rate[2];
    for (bool vc : {false, true}) {
      SolveOptions opt;
      opt.volatility_control = vc;
      const auto pay = duo ? sb_payments_competitive(grid, spec, opt) : sb_payments_monopoly(grid, spec, opt);
      const auto s = duo ? sb_schedule_competitive(pay, spec) : sb_schedule_monopoly(pay, spec);
      const auto p = simulate_paths(s, spec.initial_state, spec.agent.depreciation, grid, 100, 42);
      rate[vc] = scenario_metrics(p, grid).qv_rate;
    }
    EXPECT_LT(rate[1](0), rate[0](0));
    EXPECT_LT(rate[1](1), rate[0](1));
  }
}

}  // namespace
}  // namespace incentive
