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

#include "incentive/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "incentive/duopoly.hpp"
#include "incentive/monopoly.hpp"

namespace incentive {

using nlohmann::json;

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::optional<double> reference_contract_value(const std::string& scenario) {
  static const std::map<std::string, double> ref = {
      {"M-SB-DC", 4.24e14}, {"M-SB-DVC", 1.02e14}, {"C-SB-DC", 3.77e14}, {"C-SB-DVC", 9.87e13}};
  const auto it = ref.find(scenario);
  if (it == ref.end()) return std::nullopt;
  return it->second;
}

namespace {

MarketSpec risk_neutral(MarketSpec spec) {
  spec.agent.monopolist_risk_aversion = 0.0;
  spec.agent.competitor_risk_aversion.setZero();
  return spec;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config) {
  const auto& name = config.scenario;
  const bool mono = name.market == Market::monopoly;
  const bool vc = name.volatility_control;
  const TimeGrid grid(config.spec.principal.horizon, config.dt, config.energy_scale);
  config.spec.validate(name.market);

  ScenarioResult r(grid);
  r.config = config;
  r.name = name.str();
  // Contract-side spec: FB forces risk-neutral agents.
  const MarketSpec spec = name.regime == Regime::FB ? risk_neutral(config.spec) : config.spec;

  json ce;
  double system_residual = 0.0;
  if (name.regime == Regime::BU) {
    r.method = mono ? "business as usual (monopoly)" : "business as usual (duopoly)";
    r.controls = mono ? bu_schedule_monopoly(grid, spec, vc) : bu_schedule_competitive(grid, spec, vc);
    r.agent_marginal_revenue = agent_marginal_revenue(grid, spec);
    if (mono) {
      ce["agents"] = {agent_value_bu_monopoly(grid, spec, vc).value};
    } else {
      const auto v = agent_values_bu_competitive(grid, spec, vc);
      ce["agents"] = {v[0].value, v[1].value};
    }
    ce["principal"] = nullptr;
  } else {
    SolveOptions opt;
    opt.volatility_control = vc;
    if (mono) {
      r.payments = sb_payments_monopoly(grid, spec, opt);
      if (name.regime == Regime::FB) r.payments->method = "monopoly closed form with risk-neutral agent";
      r.prices = contract_prices_monopoly(*r.payments, spec, grid);
      r.controls = sb_schedule_monopoly(*r.payments, spec);
      system_residual = monopoly_system_residual(*r.payments, spec, grid);
      ce["agents"] = {spec.agent.monopolist_reservation};
      ce["principal"] = principal_value_sb_monopoly(*r.payments, spec, grid).value;
    } else {
      r.payments = name.regime == Regime::FB ? fb_payments_competitive(grid, spec, vc)
                                             : sb_payments_competitive(grid, spec, opt);
      r.prices = contract_prices_competitive(*r.payments, spec, grid);
      r.controls = sb_schedule_competitive(*r.payments, spec);
      system_residual = duopoly_system_residual(*r.payments, spec, grid);
      ce["agents"] = {spec.agent.competitor_reservation(0), spec.agent.competitor_reservation(1)};
      ce["principal"] = principal_value_sb_competitive(*r.payments, spec, grid).value;
    }
    r.method = r.payments->method;
  }
  r.controls.tag = r.name;

  SimulationOptions sim;
  sim.threads = config.threads;
  const PathBundle bundle = simulate_paths(r.controls, spec.initial_state, spec.agent.depreciation, grid,
                                           config.n_paths, config.seed, sim);
  r.metrics = scenario_metrics(bundle, grid);
  if (r.prices) r.contract = evaluate_contract(bundle, *r.prices, grid);

  const auto& m = r.metrics;
  json s;
  s["scenario"] = r.name;
  s["method"] = r.method;
  s["energy_scale"] = config.energy_scale;
  s["horizon"] = grid.horizon();
  s["dt"] = grid.dt();
  s["n_paths"] = config.n_paths;
  s["seed"] = config.seed;
  s["terminal"] = {{"total_capacity", m.terminal_total},
                   {"total_capacity_se", m.terminal_total_se},
                   {"renewable_share", m.terminal_share},
                   {"renewable_share_se", m.terminal_share_se},
                   {"pathwise_share", m.pathwise_share},
                   {"pathwise_share_se", m.pathwise_share_se},
                   {"mean_capacity", {m.mean(grid.steps(), 0), m.mean(grid.steps(), 1)}}};
  s["negative_capacity_paths"] = m.negative_paths;
  s["quadratic_variation_rate"] = {m.qv_rate(0), m.qv_rate(1)};
  if (r.contract) {
    const auto& c = *r.contract;
    json firms = json::array();
    for (int f = 0; f < c.fixed.size(); ++f) {
      const Eigen::VectorXd col = c.total.col(f);
      const double mu = col.mean();
      const double se = std::sqrt((col.array() - mu).square().sum() / std::max<Eigen::Index>(1, col.size() - 1) /
                                  col.size());
      firms.push_back({{"fixed", c.fixed(f)}, {"mean_variable", c.variable.col(f).mean()}, {"mean_total", mu},
                       {"se", se}});
    }
    s["contract"] = {{"mean_total", c.mean().sum()}, {"firms", firms}};
  } else {
    s["contract"] = nullptr;
  }
  s["certainty_equivalents"] = ce;
  if (r.payments) {
    s["solver"] = {{"max_picard_residual", r.payments->residual.maxCoeff()},
                   {"max_iterations", r.payments->iterations.maxCoeff()},
                   {"system_residual", system_residual}};
  }
  r.summary = s;
  return r;
}

namespace {

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header, const Eigen::MatrixXd& data,
               const std::vector<std::string>& comments = {}) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& c : comments) out << "# " << c << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) out << (c ? "," : "") << format_number(data(r, c));
    out << "\n";
  }
}

Eigen::MatrixXd hcat(std::initializer_list<Eigen::MatrixXd> parts) {
  Eigen::Index cols = 0, rows = parts.begin()->rows();
  for (const auto& p : parts) cols += p.cols();
  Eigen::MatrixXd out(rows, cols);
  Eigen::Index c = 0;
  for (const auto& p : parts) {
    out.middleCols(c, p.cols()) = p;
    c += p.cols();
  }
  return out;
}

}  // namespace

void write_outputs(const ScenarioResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Eigen::MatrixXd t = r.grid.times();
  const bool mono = r.config.scenario.market == Market::monopoly;

  if (r.payments) {
    const auto& p = *r.payments;
    std::vector<std::string> h{"t"};
    if (mono) {
      h.insert(h.end(), {"z_1", "z_2", "gamma_1", "gamma_2"});
    } else {
      h.insert(h.end(), {"z1_1", "z1_2", "z2_1", "z2_2", "gamma1_1", "gamma2_2"});
    }
    write_csv(dir / "payments.csv", h, hcat({t, p.z, p.gamma}));
  } else {
    write_csv(dir / "payments.csv", {"t", "wA_1", "wA_2"}, hcat({t, r.agent_marginal_revenue}));
  }

  write_csv(dir / "controls.csv", {"t", "a_1", "a_2", "b_1", "b_2"}, hcat({t, r.controls.a, r.controls.b}));

  if (r.prices) {
    std::vector<std::string> h{"t"}, comments;
    std::vector<Eigen::MatrixXd> parts{t};
    const auto& firms = r.prices->firms;
    for (std::size_t f = 0; f < firms.size(); ++f) {
      const std::string tag = mono ? "" : std::to_string(f + 1) + "_";
      comments.push_back("xi_F" + (mono ? std::string() : "_" + std::to_string(f + 1)) + " = " +
                         format_number(firms[f].fixed));
      comments.push_back("terminal_bonus" + (mono ? std::string() : "_" + std::to_string(f + 1)) + " = " +
                         format_number(firms[f].terminal_bonus(0)) + "," + format_number(firms[f].terminal_bonus(1)));
      for (int j = 1; j <= 2; ++j) h.push_back("piD_" + tag + std::to_string(j));
      for (int j = 1; j <= 2; ++j) h.push_back("piV_" + tag + std::to_string(j));
    }
    Eigen::MatrixXd data(t.rows(), h.size());
    data.col(0) = t;
    Eigen::Index c = 1;
    for (const auto& f : firms) {
      data.middleCols(c, 2) = f.drift;
      data.middleCols(c + 2, 2) = f.vol;
      c += 4;
    }
    comments.push_back("energy_scale = " + format_number(r.prices->energy_scale));
    write_csv(dir / "prices.csv", h, data, comments);
  } else {
    write_csv(dir / "prices.csv", {"t"}, t, {"no contract"});
  }

  const auto& m = r.metrics;
  write_csv(dir / "paths.csv",
            {"t", "mean_x1", "mean_x2", "mean_total", "q05_x1", "q95_x1", "q05_x2", "q95_x2", "q05_total",
             "q95_total", "share"},
            hcat({t, m.mean, m.q05.col(0), m.q95.col(0), m.q05.col(1), m.q95.col(1), m.q05.col(2), m.q95.col(2),
                  m.share}));

  std::ofstream js(dir / "summary.json");
  js << r.summary.dump(2) << "\n";
}

std::vector<json> load_summaries(const std::filesystem::path& dir) {
  std::vector<json> out;
  if (std::filesystem::is_directory(dir)) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
      if (e.is_directory() && std::filesystem::exists(e.path() / "summary.json")) files.push_back(e.path() / "summary.json");
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      std::ifstream in(f);
      out.push_back(json::parse(in));
    }
  }
  if (out.size() < 2) {
    std::string names;
    for (const auto& n : ScenarioName::all()) {
      const bool have = std::any_of(out.begin(), out.end(), [&](const json& s) { return s["scenario"] == n.str(); });
      if (!have) names += " " + n.str();
    }
    throw std::runtime_error("need at least two scenario outputs in " + dir.string() + "; missing:" + names);
  }
  return out;
}

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

Report render_report(const std::vector<json>& summaries) {
  // Rows in canonical scenario order, then anything unrecognised.
  std::vector<const json*> rows;
  for (const auto& n : ScenarioName::all())
    for (const auto& s : summaries)
      if (s["scenario"] == n.str()) rows.push_back(&s);

  std::ostringstream t;
  char line[256];
  std::snprintf(line, sizeof line, "%-9s %-12s %-12s %-12s %-8s %-12s %-8s  %s\n", "scenario", "kappa", "contract",
                "reference", "ratio", "capacity_T", "share_T", "method");
  t << line;
  std::map<std::string, double> value;
  for (const json* s : rows) {
    const std::string name = (*s)["scenario"];
    std::string contract = "-", ref = "-", ratio = "-";
    if (!(*s)["contract"].is_null()) {
      const double v = (*s)["contract"]["mean_total"];
      value[name] = v;
      contract = sci(v);
      if (const auto r = reference_contract_value(name)) {
        ref = sci(*r);
        ratio = fixed(v / *r, 3);
      }
    }
    std::snprintf(line, sizeof line, "%-9s %-12s %-12s %-12s %-8s %-12s %-8s  %s\n", name.c_str(),
                  format_number((*s)["energy_scale"].get<double>()).c_str(), contract.c_str(), ref.c_str(),
                  ratio.c_str(), fixed((*s)["terminal"]["total_capacity"], 1).c_str(),
                  fixed((*s)["terminal"]["renewable_share"], 4).c_str(), (*s)["method"].get<std::string>().c_str());
    t << line;
  }

  Report rep;
  const std::vector<std::string> order{"M-SB-DC", "C-SB-DC", "M-SB-DVC", "C-SB-DVC"};
  for (const auto& n : order)
    if (!value.count(n)) rep.missing.push_back(n);
  if (rep.missing.empty()) {
    rep.ordering_checked = true;
    rep.ordering_holds = value["M-SB-DC"] > value["C-SB-DC"] && value["C-SB-DC"] > value["M-SB-DVC"] &&
                         value["M-SB-DVC"] > value["C-SB-DVC"];
    t << "ordering xi_M^DC > xi_C^DC > xi_M^DVC > xi_C^DVC: " << (rep.ordering_holds ? "TRUE" : "FALSE") << "\n";
  } else {
    t << "ordering check skipped; missing:";
    for (const auto& n : rep.missing) t << " " << n;
    t << "\n";
  }
  rep.table = t.str();
  return rep;
}

}  // namespace incentive
