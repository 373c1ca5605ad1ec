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

// Acceptance checks.  Prints one PASS/FAIL line per criterion; exits nonzero
// when any selected criterion fails.  Usage: acceptance [--criterion N]...

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "incentive/duopoly.hpp"
#include "incentive/general_lq.hpp"
#include "incentive/monopoly.hpp"
#include "incentive/scenario.hpp"
#include "incentive/simulator.hpp"

using namespace incentive;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / (1 + std::abs(b)); }

const TimeGrid& grid() {
  static const TimeGrid g(10.0, 1.0 / 52.0);
  return g;
}

SolveOptions regime(bool vc) {
  SolveOptions o;
  o.volatility_control = vc;
  return o;
}

// Residual of the payer's first-order conditions relative to the size of the
// risk terms.
double stationarity(const GeneralModel<double>& m, const Eigen::VectorXd& z, const Eigen::VectorXd& vol,
                    const Eigen::VectorXd& wP) {
  const Eigen::VectorXd var = vol.array().square();
  const Eigen::VectorXd grad = principal_gradient<double>(z, var, m, wP);
  double eta = m.principal_risk_aversion;
  for (double e : m.risk_aversion) eta = std::max(eta, e);
  const double scale = 1 + var.maxCoeff() * eta * (wP.cwiseAbs().maxCoeff() + z.cwiseAbs().maxCoeff());
  return grad.cwiseAbs().maxCoeff() / scale;
}

Outcome fixed_point_validity() {
  const MarketSpec spec;
  const auto t0 = Clock::now();
  double worst = 0;
  for (bool vc : {true, false}) {
    const auto m = sb_payments_monopoly(grid(), spec, regime(vc));
    const auto c = sb_payments_competitive(grid(), spec, regime(vc));
    if (m.rows() != 521 || c.rows() != 521) return {false, "schedule does not have 521 rows"};
    worst = std::max({worst, monopoly_system_residual(m, spec, grid()), duopoly_system_residual(c, spec, grid())});
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-9 && t < 5.0, fmt("max residual %.3g (limit 1e-9), %.2f s (limit 5 s)", worst, t)};
}

Outcome terminal_conditions() {
  const MarketSpec spec;
  const double h = spec.principal.vol_penalty, eps = std::numeric_limits<double>::epsilon();
  double dz = 0, dg = 0;
  for (bool vc : {true, false}) {
    const auto s = sb_payments_monopoly(grid(), spec, regime(vc));
    const int T = grid().steps();
    dz = std::max({dz, std::abs(s.z(T, 0)), std::abs(s.z(T, 1))});
    dg = std::max({dg, std::abs(s.gamma(T, 0) + h), std::abs(s.gamma(T, 1) + h)});
  }
  return {dz <= eps && dg <= 4 * eps * h, fmt("|z(T)| = %.3g, |gamma(T) + h| = %.3g", dz, dg)};
}

Outcome first_best_collapse() {
  MarketSpec mono;
  mono.agent.monopolist_risk_aversion = 0;
  MarketSpec duo;
  duo.agent.competitor_risk_aversion = {0, 0};
  duo.agent.congestion = 0;
  double dm = 0, dgam = 0, dd = 0, dx = 0;
  for (bool vc : {true, false}) {
    const auto m = sb_payments_monopoly(grid(), mono, regime(vc));
    dm = std::max(dm, (m.z - m.w_principal).cwiseAbs().maxCoeff());
    dgam = std::max(dgam, (m.gamma.array() + mono.principal.vol_penalty).abs().maxCoeff());
    const auto c = sb_payments_competitive(grid(), duo, regime(vc));
    for (int i = 0; i < c.rows(); ++i) {
      for (int j = 0; j < 2; ++j) {
        dd = std::max(dd, std::abs(c.payment(i, j, j) - c.w_principal(i, j)));
        dx = std::max(dx, std::abs(c.payment(i, 1 - j, j)));
      }
    }
  }
  const bool ok = dm <= 1e-9 && dgam <= 1e-9 && dd <= 1e-9 && dx <= 1e-9;
  return {ok, fmt("monopoly |z - wP| %.3g, |gamma + h| %.3g; duopoly |own - wP| %.3g, |cross| %.3g", dm, dgam, dd,
                  dx)};
}

Outcome general_equivalence() {
  const MarketSpec spec;
  const double kappa = grid().energy_scale();
  double worst = 0;
  for (bool vc : {true, false}) {
    const auto gm = sb_fixed_point_general(embed_monopoly(spec, kappa, vc), grid());
    const auto cm = sb_payments_monopoly(grid(), spec, regime(vc));
    const auto gd = sb_fixed_point_general(embed_duopoly(spec, kappa, vc), grid());
    const auto cd = sb_payments_competitive(grid(), spec, regime(vc));
    for (int i = 0; i < grid().size(); ++i) {
      for (int k = 0; k < 2; ++k) {
        worst = std::max({worst, rel(gm.z(i, k), cm.z(i, k)), rel(gm.gamma(i, k), cm.gamma(i, k)),
                          rel(gm.vol(i, k), cm.vol(i, k)), rel(gd.gamma(i, k), cd.gamma(i, k)),
                          rel(gd.vol(i, k), cd.vol(i, k))});
      }
      for (int k = 0; k < 4; ++k) worst = std::max(worst, rel(gd.z(i, k), cd.z(i, k)));
    }
  }
  return {worst <= 1e-8, fmt("max relative difference %.3g (limit 1e-8)", worst)};
}

Outcome structure_equivalence() {
  MarketSpec spec;
  spec.agent.congestion = 0;
  spec.agent.competitor_risk_aversion = Eigen::Vector2d::Constant(spec.agent.monopolist_risk_aversion);
  double worst = 0, vm = 0;
  for (bool vc : {true, false}) {
    const auto m = sb_payments_monopoly(grid(), spec, regime(vc));
    PaymentSchedule c = m;
    c.agents = 2;
    c.z = Eigen::MatrixXd::Zero(m.rows(), 4);
    c.z.col(payment_index(0, 0)) = m.z.col(0);
    c.z.col(payment_index(1, 1)) = m.z.col(1);
    vm = principal_value_sb_monopoly(m, spec, grid()).value;
    const double vc_ = principal_value_sb_competitive(c, spec, grid()).value;
    worst = std::max(worst, std::abs(vm - vc_) / (1 + std::abs(vm)));
  }
  return {worst <= 1e-8, fmt("|vM - vC| / (1 + |vM|) = %.3g (limit 1e-8), vM = %.6g", worst, vm)};
}

double reduced_objective(const Eigen::Vector2d& z, const Eigen::Vector2d& wP, const MarketSpec& spec, double kappa) {
  const auto& s = spec.agent;
  const Eigen::Vector2d a = monopoly_drift(z, spec);
  double v = wP.dot(a);
  const double etaA = kappa * s.monopolist_risk_aversion, etaP = kappa * spec.principal.risk_aversion;
  for (int j = 0; j < 2; ++j) {
    v -= drift_cost(j, a, s);
    const double M = -spec.principal.vol_penalty - etaA * z(j) * z(j) - etaP * (wP(j) - z(j)) * (wP(j) - z(j));
    v += phi_star(M, s.vol_cost_scale(j), s.uncontrolled_vol(j), spec.vol_floor_ratio);
  }
  return v;
}

Outcome brute_force() {
  const MarketSpec spec;
  const auto t0 = Clock::now();
  const auto s = sb_payments_monopoly(grid(), spec);
  const double kappa = grid().energy_scale();
  std::string detail;
  bool ok = true;
  for (int i : {0, grid().steps() / 2}) {
    const Eigen::Vector2d z = s.z.row(i).transpose(), wP = s.w_principal.row(i).transpose();
    const double best = reduced_objective(z, wP, spec, kappa);
    double scan = -INFINITY;
    Eigen::Vector2d arg;
    const int n = 401;
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        const Eigen::Vector2d y(z(0) * (0.8 + 0.4 * u / (n - 1.0)), z(1) * (0.8 + 0.4 * v / (n - 1.0)));
        const double f = reduced_objective(y, wP, spec, kappa);
        if (f > scan) {
          scan = f;
          arg = y;
        }
      }
    const double gap = (scan - best) / std::abs(best);
    ok = ok && gap <= 1e-10;
    detail += fmt("t=%g: solution %.10g, grid max %.10g (rel excess %.2g); ", grid().time(i), best, scan, gap);
  }
  const double t = seconds_since(t0);
  ok = ok && t < 30.0;
  return {ok, detail + fmt("%.2f s (limit 30 s)", t)};
}

Outcome control_ordering() {
  const MarketSpec spec;
  const auto m = sb_schedule_monopoly(sb_payments_monopoly(grid(), spec), spec);
  const auto c = sb_schedule_competitive(sb_payments_competitive(grid(), spec), spec);
  int bad = 0, first = -1;
  for (int i = 0; i < grid().size(); ++i) {
    const bool hold = m.a(i, 0) <= c.a(i, 0) && c.a(i, 0) <= c.a(i, 1) && c.a(i, 1) <= m.a(i, 1);
    if (!hold) {
      ++bad;
      if (first < 0) first = i;
    }
  }
  const int T = grid().steps();
  std::string d = fmt("%d of 521 grid points violate", bad);
  if (bad > 0)
    d += fmt(" (first at t=%.4f); at T: a1M=%.3f a1=%.3f a2=%.3f a2M=%.3f", grid().time(first), m.a(T, 0), c.a(T, 0),
             c.a(T, 1), m.a(T, 1));
  return {bad == 0, d};
}

Outcome terminal_coincidence() {
  const MarketSpec spec;
  double worst = 0;
  for (bool vc : {true, false}) {
    const auto sb = sb_schedule_monopoly(sb_payments_monopoly(grid(), spec, regime(vc)), spec);
    const auto bu = bu_schedule_monopoly(grid(), spec, vc);
    const int T = grid().steps();
    worst = std::max({worst, std::abs(sb.a(T, 0) - bu.a(T, 0)), std::abs(sb.a(T, 1) - bu.a(T, 1))});
  }
  return {worst <= 1e-9, fmt("max |aSB(T) - aBU(T)| = %.3g", worst)};
}

std::vector<ScenarioResult> run_suite(const std::vector<ScenarioName>& names) {
  std::vector<ScenarioResult> out;
  for (const auto& n : names) {
    ScenarioConfig c;
    c.scenario = n;
    c.n_paths = 1000;
    c.seed = 42;
    out.push_back(run_scenario(c));
  }
  return out;
}

Outcome scenario_reproduction() {
  const auto t0 = Clock::now();
  const auto all = run_suite(ScenarioName::all());
  const double t = seconds_since(t0);
  bool ok = t < 60.0;
  std::string d;
  for (const auto& r : all) {
    const auto& m = r.metrics;
    if (r.name == "M-SB-DVC") {
      const bool s = std::abs(m.terminal_share - 0.95) <= 0.10;
      const bool cap = std::abs(m.terminal_total - 11000.0) <= 0.15 * 11000.0;
      ok = ok && s && cap;
      d += fmt("M-SB-DVC share %.4f+-%.4f [%s], capacity %.1f [%s]; ", m.terminal_share, m.terminal_share_se,
               s ? "ok" : "out", m.terminal_total, cap ? "ok" : "out");
    } else if (r.name == "C-SB-DVC") {
      const bool s = std::abs(m.terminal_share - 0.75) <= 0.10;
      ok = ok && s;
      d += fmt("C-SB-DVC share %.4f+-%.4f [%s]; ", m.terminal_share, m.terminal_share_se, s ? "ok" : "out");
    } else if (r.config.scenario.regime == Regime::BU) {
      const bool s = m.terminal_share < 0.20;
      ok = ok && s;
      d += fmt("%s share %.4f [%s]; ", r.name.c_str(), m.terminal_share, s ? "ok" : "not < 0.20");
    }
  }
  return {ok, d + fmt("suite %.2f s (limit 60 s)", t)};
}

Outcome contract_ordering() {
  std::vector<ScenarioName> names;
  for (const char* n : {"M-SB-DC", "C-SB-DC", "M-SB-DVC", "C-SB-DVC"}) names.push_back(ScenarioName::parse(n));
  const auto runs = run_suite(names);
  double v[4];
  bool magnitude = true;
  std::string d = fmt("kappa %g; ", runs[0].config.energy_scale);
  for (int k = 0; k < 4; ++k) {
    v[k] = runs[k].contract->mean().sum();
    const double ratio = v[k] / *reference_contract_value(runs[k].name);
    magnitude = magnitude && ratio >= 1.0 / 3.0 && ratio <= 3.0;
    d += fmt("%s %.4e (ratio %.3f); ", runs[k].name.c_str(), v[k], ratio);
  }
  const bool order = v[0] > v[1] && v[1] > v[2] && v[2] > v[3];
  return {order && magnitude, d + (order ? "ordering holds" : "ordering fails")};
}

Outcome simulator_moments() {
  const Eigen::Vector2d a(300, 500), b(300, 750), delta(0.1, 0.05), x0(4000, 1000);
  ControlSchedule s;
  s.times = grid().times();
  s.a = a.transpose().replicate(grid().size(), 1);
  s.b = b.transpose().replicate(grid().size(), 1);
  const int n = 100000;
  const Eigen::MatrixXd X = simulate_terminal(s, x0, delta, grid(), n, 20240601);
  const double T = grid().horizon();
  bool ok = true;
  std::string d;
  for (int j = 0; j < 2; ++j) {
    const double e = std::exp(-delta(j) * T);
    const double mean = x0(j) * e + a(j) / delta(j) * (1 - e);
    const double var = b(j) * b(j) * (1 - e * e) / (2 * delta(j));
    const Eigen::ArrayXd c = X.col(j).array();
    const double m = c.mean();
    const double v = (c - m).square().sum() / (n - 1);
    const double se_m = std::sqrt(v / n), se_v = std::sqrt(((c - m).pow(4).mean() - v * v) / n);
    const double zm = (m - mean) / se_m, zv = (v - var) / se_v;
    ok = ok && std::abs(zm) <= 3 && std::abs(zv) <= 3;
    d += fmt("X%d mean z-score %.2f, variance z-score %.2f; ", j + 1, zm, zv);
  }
  return {ok, d};
}

// Randomly perturbed reference data.
MarketSpec perturbed(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.8, 1.2);
  MarketSpec s;
  s.agent.linear_cost = s.agent.linear_cost.unaryExpr([&](double v) { return v * U(rng); });
  s.agent.quadratic_cost = s.agent.quadratic_cost.unaryExpr([&](double v) { return v * U(rng); });
  s.agent.congestion *= U(rng);
  s.agent.vol_cost_scale = s.agent.vol_cost_scale.unaryExpr([&](double v) { return v * U(rng); });
  s.agent.monopolist_risk_aversion *= U(rng);
  s.agent.competitor_risk_aversion = s.agent.competitor_risk_aversion.unaryExpr([&](double v) { return v * U(rng); });
  s.principal.externality = s.principal.externality.unaryExpr([&](double v) { return v * U(rng); });
  s.principal.vol_penalty *= U(rng);
  s.principal.risk_aversion *= U(rng);
  return s;
}

Outcome foc_checks() {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> row(0, grid().steps());
  const double kappa = grid().energy_scale();
  double dm = 0, st = 0;
  for (int probe = 0; probe < 20; ++probe) {
    const MarketSpec spec = perturbed(rng);
    const int i = row(rng);
    const Eigen::MatrixXd W = principal_marginal_revenue(grid(), spec);
    const Eigen::Vector2d wP = W.row(i).transpose();
    // Channel maximizer of m-hat; m-hat is quadratic so a unit step is exact.
    const double etaA = kappa * spec.agent.monopolist_risk_aversion, etaP = kappa * spec.principal.risk_aversion;
    const Eigen::Vector2d zs = etaP / (etaA + etaP) * wP;
    for (int j = 0; j < 2; ++j) {
      const Eigen::Vector2d e = Eigen::Vector2d::Unit(j);
      const double fd =
          (monopoly_m_hat(zs + e, wP, spec, kappa)(j) - monopoly_m_hat(zs - e, wP, spec, kappa)(j)) / 2;
      dm = std::max(dm, std::abs(fd));
    }
    const auto model = probe % 2 ? embed_duopoly(spec, kappa) : embed_monopoly(spec, kappa);
    const ZAssembler<double> za(model);
    const auto sol = sb_point_general(za, Eigen::VectorXd(wP));
    st = std::max(st, stationarity(model, sol.z, sol.vol, wP));
  }
  return {dm <= 1e-6 && st <= 1e-9, fmt("max |dm/dz| %.3g (limit 1e-6), max stationarity residual %.3g (limit 1e-9)",
                                        dm, st)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"fixed-point validity", fixed_point_validity},
      {"terminal conditions", terminal_conditions},
      {"first-best collapse", first_best_collapse},
      {"general vs specialized", general_equivalence},
      {"market-structure value equivalence", structure_equivalence},
      {"brute-force oracle", brute_force},
      {"control ordering", control_ordering},
      {"terminal coincidence", terminal_coincidence},
      {"scenario reproduction", scenario_reproduction},
      {"contract value ordering", contract_ordering},
      {"simulator moments", simulator_moments},
      {"first-order conditions", foc_checks},
  };
  std::vector<int> selected;
  for (int k = 1; k < argc; ++k) {
    if (std::strcmp(argv[k], "--criterion") == 0 && k + 1 < argc) {
      const int n = std::atoi(argv[++k]);
      if (n < 1 || n > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "unknown criterion %s\n", argv[k]);
        return 2;
      }
      selected.push_back(n);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty())
    for (int n = 1; n <= static_cast<int>(criteria.size()); ++n) selected.push_back(n);

  int failed = 0;
  for (int n : selected) {
    Outcome o;
    try {
      o = criteria[n - 1].run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %2d %-36s %s  %s\n", n, criteria[n - 1].name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
