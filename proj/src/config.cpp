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

#include "incentive/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace incentive {

std::string ScenarioName::str() const {
  std::string s = market == Market::monopoly ? "M-" : "C-";
  s += regime == Regime::BU ? "BU-" : regime == Regime::SB ? "SB-" : "FB-";
  s += volatility_control ? "DVC" : "DC";
  return s;
}

ScenarioName ScenarioName::parse(const std::string& s) {
  for (const auto& n : all())
    if (n.str() == s) return n;
  throw std::invalid_argument("unknown scenario '" + s + "' (expected e.g. M-SB-DVC)");
}

std::vector<ScenarioName> ScenarioName::all() {
  std::vector<ScenarioName> out;
  for (Market m : {Market::monopoly, Market::duopoly})
    for (Regime r : {Regime::BU, Regime::SB, Regime::FB})
      for (bool v : {false, true}) out.push_back({m, r, v});
  return out;
}

ConfigError::ConfigError(const std::string& source, int line_no, const std::string& f, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line_no) + ": " + f + ": " + what), field(f), line(line_no) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& v) {
  double out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(out))
    throw std::invalid_argument("expected a finite number, got '" + v + "'");
  return out;
}

template <typename Int>
Int parse_int(const std::string& v) {
  Int out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw std::invalid_argument("expected an integer, got '" + v + "'");
  return out;
}

struct Field {
  std::string name;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

Field real(const std::string& name, std::function<double&(ScenarioConfig&)> ref) {
  return {name, [ref](ScenarioConfig& c, const std::string& v) { ref(c) = parse_double(v); },
          [ref](const ScenarioConfig& c) { return format_double(ref(const_cast<ScenarioConfig&>(c))); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"scenario", [](ScenarioConfig& c, const std::string& v) { c.scenario = ScenarioName::parse(v); },
                 [](const ScenarioConfig& c) { return c.scenario.str(); }});
    f.push_back({"market",
                 [](ScenarioConfig& c, const std::string& v) {
                   if (v != "M" && v != "C") throw std::invalid_argument("expected M or C");
                   c.scenario.market = v == "M" ? Market::monopoly : Market::duopoly;
                 },
                 nullptr});
    f.push_back({"regime",
                 [](ScenarioConfig& c, const std::string& v) {
                   if (v == "BU") c.scenario.regime = Regime::BU;
                   else if (v == "SB") c.scenario.regime = Regime::SB;
                   else if (v == "FB") c.scenario.regime = Regime::FB;
                   else throw std::invalid_argument("expected BU, SB or FB");
                 },
                 nullptr});
    f.push_back({"vol_control",
                 [](ScenarioConfig& c, const std::string& v) {
                   if (v != "DC" && v != "DVC") throw std::invalid_argument("expected DC or DVC");
                   c.scenario.volatility_control = v == "DVC";
                 },
                 nullptr});
    f.push_back(real("power_price", [](ScenarioConfig& c) -> double& { return c.spec.principal.power_price; }));
    f.push_back(real("externality_1", [](ScenarioConfig& c) -> double& { return c.spec.principal.externality(0); }));
    f.push_back(real("externality_2", [](ScenarioConfig& c) -> double& { return c.spec.principal.externality(1); }));
    f.push_back(real("vol_penalty", [](ScenarioConfig& c) -> double& { return c.spec.principal.vol_penalty; }));
    f.push_back(real("principal_risk_aversion",
                     [](ScenarioConfig& c) -> double& { return c.spec.principal.risk_aversion; }));
    f.push_back(real("horizon", [](ScenarioConfig& c) -> double& { return c.spec.principal.horizon; }));
    for (int j = 0; j < 2; ++j) {
      const std::string s = "_" + std::to_string(j + 1);
      f.push_back(real("linear_cost" + s, [j](ScenarioConfig& c) -> double& { return c.spec.agent.linear_cost(j); }));
      f.push_back(
          real("quadratic_cost" + s, [j](ScenarioConfig& c) -> double& { return c.spec.agent.quadratic_cost(j); }));
      f.push_back(
          real("vol_cost_scale" + s, [j](ScenarioConfig& c) -> double& { return c.spec.agent.vol_cost_scale(j); }));
      f.push_back(real("sigma" + s, [j](ScenarioConfig& c) -> double& { return c.spec.agent.uncontrolled_vol(j); }));
      f.push_back(real("depreciation" + s, [j](ScenarioConfig& c) -> double& { return c.spec.agent.depreciation(j); }));
      f.push_back(real("risk_aversion" + s,
                       [j](ScenarioConfig& c) -> double& { return c.spec.agent.competitor_risk_aversion(j); }));
      f.push_back(real("reservation_ce" + s,
                       [j](ScenarioConfig& c) -> double& { return c.spec.agent.competitor_reservation(j); }));
      f.push_back(real("initial_capacity" + s, [j](ScenarioConfig& c) -> double& { return c.spec.initial_state(j); }));
    }
    f.push_back(real("congestion", [](ScenarioConfig& c) -> double& { return c.spec.agent.congestion; }));
    f.push_back(real("agent_risk_aversion",
                     [](ScenarioConfig& c) -> double& { return c.spec.agent.monopolist_risk_aversion; }));
    f.push_back(real("reservation_ce", [](ScenarioConfig& c) -> double& { return c.spec.agent.monopolist_reservation; }));
    f.push_back(real("vol_floor_ratio", [](ScenarioConfig& c) -> double& { return c.spec.vol_floor_ratio; }));
    f.push_back(real("dt", [](ScenarioConfig& c) -> double& { return c.dt; }));
    f.push_back(real("energy_scale", [](ScenarioConfig& c) -> double& { return c.energy_scale; }));
    f.push_back({"n_paths", [](ScenarioConfig& c, const std::string& v) { c.n_paths = parse_int<int>(v); },
                 [](const ScenarioConfig& c) { return std::to_string(c.n_paths); }});
    f.push_back({"seed", [](ScenarioConfig& c, const std::string& v) { c.seed = parse_int<std::uint64_t>(v); },
                 [](const ScenarioConfig& c) { return std::to_string(c.seed); }});
    f.push_back({"threads", [](ScenarioConfig& c, const std::string& v) { c.threads = parse_int<int>(v); },
                 [](const ScenarioConfig& c) { return std::to_string(c.threads); }});
    f.push_back({"output_dir", [](ScenarioConfig& c, const std::string& v) { c.output_dir = v; },
                 [](const ScenarioConfig& c) { return c.output_dir; }});
    return f;
  }();
  return table;
}

const Field* find_field(const std::string& key) {
  for (const auto& f : fields())
    if (f.name == key) return &f;
  return nullptr;
}

struct Entry {
  int line;
  std::string key, value;
};

std::vector<Entry> tokenize(const std::string& text, const std::string& source) {
  std::vector<Entry> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, trim(s), "expected 'key = value'");
    Entry e{line, trim(s.substr(0, eq)), trim(s.substr(eq + 1))};
    if (e.key.empty()) throw ConfigError(source, line, "<empty>", "missing key");
    out.push_back(e);
  }
  return out;
}

void apply(ScenarioConfig& c, const Entry& e, const std::string& source) {
  const Field* f = find_field(e.key);
  if (!f) throw ConfigError(source, e.line, e.key, "unknown field");
  if (e.value.empty()) throw ConfigError(source, e.line, e.key, "missing value");
  try {
    f->set(c, e.value);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(source, e.line, e.key, err.what());
  }
}

void check(const ScenarioConfig& c, const std::string& source) {
  if (c.n_paths <= 0) throw ConfigError(source, 0, "n_paths", "must be positive");
  if (!(c.dt > 0)) throw ConfigError(source, 0, "dt", "must be positive");
  if (!(c.energy_scale > 0)) throw ConfigError(source, 0, "energy_scale", "must be positive");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "<file>", "cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
  ScenarioConfig c;
  for (const auto& e : tokenize(text, source)) {
    if (e.key == "run") throw ConfigError(source, e.line, e.key, "run entries are only allowed in manifests");
    apply(c, e, source);
  }
  check(c, source);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path), path.string()); }

bool is_manifest(const std::string& text) {
  for (const auto& e : tokenize(text, "<manifest>"))
    if (e.key == "run") return true;
  return false;
}

std::vector<ScenarioConfig> load_manifest(const std::filesystem::path& path) {
  const std::string source = path.string();
  ScenarioConfig base;
  std::vector<Entry> runs;
  for (const auto& e : tokenize(read_file(path), source)) {
    if (e.key == "run") {
      if (e.value.empty()) throw ConfigError(source, e.line, e.key, "missing value");
      runs.push_back(e);
    } else {
      apply(base, e, source);
    }
  }
  check(base, source);
  std::vector<ScenarioConfig> out;
  for (const auto& r : runs) {
    bool is_name = true;
    try {
      ScenarioName::parse(r.value);
    } catch (const std::invalid_argument&) {
      is_name = false;
    }
    if (is_name) {
      ScenarioConfig c = base;
      c.scenario = ScenarioName::parse(r.value);
      out.push_back(c);
    } else {
      out.push_back(load_config(path.parent_path() / r.value));
    }
  }
  return out;
}

std::string render_config(const ScenarioConfig& c) {
  std::string out;
  for (const auto& f : fields()) {
    if (!f.get) continue;
    out += f.name + " = " + f.get(c) + "\n";
  }
  return out;
}

}  // namespace incentive
