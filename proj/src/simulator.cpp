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

#include "incentive/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "incentive/rng.hpp"

namespace incentive {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("INCENTIVE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

template <typename Fn>
void parallel_paths(int n_paths, int threads, Fn&& fn) {
  threads = std::min(threads, n_paths);
  if (threads <= 1) {
    fn(0, n_paths);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (n_paths + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk, hi = std::min(n_paths, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

void check_inputs(const ControlSchedule& s, const TimeGrid& grid, int n_paths) {
  if (n_paths <= 0) throw DomainError("simulate_paths: n_paths must be positive");
  if (s.a.rows() != grid.size() || s.b.rows() != grid.size() || s.a.cols() != 2 || s.b.cols() != 2)
    throw DomainError("simulate_paths: schedule does not match the grid");
  if (!s.a.allFinite() || !s.b.allFinite() || (s.b.array() < 0).any())
    throw DomainError("simulate_paths: schedule must be finite with nonnegative volatility");
}

// One Euler-Maruyama step for both technologies.
struct Stepper {
  const ControlSchedule& s;
  Eigen::Vector2d delta;
  double dt, sqdt;
  std::uint64_t seed;

  Eigen::Vector2d step(const Eigen::Vector2d& x, int path, int k) const {
    const auto [n1, n2] = normal_pair(seed, static_cast<std::uint64_t>(path), static_cast<std::uint32_t>(k));
    Eigen::Vector2d next;
    next(0) = x(0) + (s.a(k, 0) - delta(0) * x(0)) * dt + s.b(k, 0) * sqdt * n1;
    next(1) = x(1) + (s.a(k, 1) - delta(1) * x(1)) * dt + s.b(k, 1) * sqdt * n2;
    return next;
  }
};

}  // namespace

PathBundle simulate_paths(const ControlSchedule& schedule, const Eigen::Vector2d& x0, const Eigen::Vector2d& delta,
                          const TimeGrid& grid, int n_paths, std::uint64_t seed, const SimulationOptions& opt,
                          const ContractPrices* stream_prices) {
  check_inputs(schedule, grid, n_paths);
  const int M = grid.steps();
  const double dt = grid.dt();
  const Stepper st{schedule, delta, dt, std::sqrt(dt), seed};

  PathBundle out;
  out.seed = seed;
  out.n_paths = n_paths;
  out.x1.resize(n_paths, M + 1);
  out.x2.resize(n_paths, M + 1);
  out.qv1.resize(n_paths, M);
  out.qv2.resize(n_paths, M);
  out.went_negative.assign(n_paths, 0);
  const int firms = stream_prices ? static_cast<int>(stream_prices->firms.size()) : 0;
  out.streamed_contract.setZero(n_paths, firms);

  parallel_paths(n_paths, resolve_threads(opt.threads), [&](int lo, int hi) {
    std::vector<double> acc(firms);
    for (int p = lo; p < hi; ++p) {
      Eigen::Vector2d x = x0;
      std::fill(acc.begin(), acc.end(), 0.0);
      bool negative = (x.array() < 0).any();
      out.x1(p, 0) = x(0);
      out.x2(p, 0) = x(1);
      for (int k = 0; k < M; ++k) {
        const Eigen::Vector2d next = st.step(x, p, k);
        Eigen::Vector2d qv;
        if (opt.squared_increments) {
          qv = (next - x).cwiseAbs2();
        } else {
          qv = schedule.b.row(k).transpose().cwiseAbs2() * dt;
        }
        out.qv1(p, k) = qv(0);
        out.qv2(p, k) = qv(1);
        for (int f = 0; f < firms; ++f) {
          const auto& fp = stream_prices->firms[f];
          for (int j = 0; j < 2; ++j)
            acc[f] += (x(j) - stream_prices->baseline(j)) * fp.drift(k, j) * dt + 0.5 * fp.vol(k, j) * qv(j);
        }
        x = next;
        negative = negative || (x.array() < 0).any();
        out.x1(p, k + 1) = x(0);
        out.x2(p, k + 1) = x(1);
      }
      out.went_negative[p] = negative;
      for (int f = 0; f < firms; ++f) {
        const auto& fp = stream_prices->firms[f];
        acc[f] += (x - stream_prices->baseline).dot(fp.terminal_bonus);
        out.streamed_contract(p, f) = fp.fixed + stream_prices->energy_scale * acc[f];
      }
    }
  });
  return out;
}

Eigen::MatrixXd simulate_terminal(const ControlSchedule& schedule, const Eigen::Vector2d& x0,
                                  const Eigen::Vector2d& delta, const TimeGrid& grid, int n_paths,
                                  std::uint64_t seed, const SimulationOptions& opt) {
  check_inputs(schedule, grid, n_paths);
  const double dt = grid.dt();
  const Stepper st{schedule, delta, dt, std::sqrt(dt), seed};
  Eigen::MatrixXd out(n_paths, 2);
  parallel_paths(n_paths, resolve_threads(opt.threads), [&](int lo, int hi) {
    for (int p = lo; p < hi; ++p) {
      Eigen::Vector2d x = x0;
      for (int k = 0; k < grid.steps(); ++k) x = st.step(x, p, k);
      out.row(p) = x.transpose();
    }
  });
  return out;
}

ContractValues evaluate_contract(const PathBundle& bundle, const ContractPrices& prices, const TimeGrid& grid) {
  const int M = grid.steps();
  if (bundle.x1.cols() != M + 1 || prices.times.size() != M + 1)
    throw DomainError("evaluate_contract: bundle and prices are on different grids");
  for (const auto& f : prices.firms)
    if (f.drift.rows() != M + 1 || f.vol.rows() != M + 1)
      throw DomainError("evaluate_contract: price arrays do not match the grid");
  const int firms = static_cast<int>(prices.firms.size());
  const double dt = grid.dt();
  ContractValues v;
  v.fixed.resize(firms);
  v.variable.resize(bundle.n_paths, firms);
  for (int f = 0; f < firms; ++f) v.fixed(f) = prices.firms[f].fixed;
  for (int p = 0; p < bundle.n_paths; ++p) {
    for (int f = 0; f < firms; ++f) {
      const auto& fp = prices.firms[f];
      double acc = 0.0;
      for (int k = 0; k < M; ++k) {
        const double x[2] = {bundle.x1(p, k), bundle.x2(p, k)};
        const double qv[2] = {bundle.qv1(p, k), bundle.qv2(p, k)};
        for (int j = 0; j < 2; ++j)
          acc += (x[j] - prices.baseline(j)) * fp.drift(k, j) * dt + 0.5 * fp.vol(k, j) * qv[j];
      }
      const Eigen::Vector2d xT(bundle.x1(p, M), bundle.x2(p, M));
      acc += (xT - prices.baseline).dot(fp.terminal_bonus);
      v.variable(p, f) = prices.energy_scale * acc;
    }
  }
  v.total = v.variable.rowwise() + v.fixed.transpose();
  return v;
}

namespace {

// Linear-interpolation quantile of a scratch vector (reordered in place).
double quantile(std::vector<double>& v, double q) {
  const double pos = q * (v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - lo;
  std::nth_element(v.begin(), v.begin() + lo, v.end());
  const double a = v[lo];
  if (frac == 0.0 || lo + 1 >= v.size()) return a;
  const double b = *std::min_element(v.begin() + lo + 1, v.end());
  return a + frac * (b - a);
}

double standard_error(const Eigen::VectorXd& x) {
  const auto n = x.size();
  if (n < 2) return 0.0;
  const double mu = x.mean();
  return std::sqrt((x.array() - mu).square().sum() / (n - 1) / n);
}

}  // namespace

ScenarioMetrics scenario_metrics(const PathBundle& b, const TimeGrid& grid) {
  ScenarioMetrics m;
  const int n = b.n_paths, rows = static_cast<int>(b.x1.cols());
  if (n <= 0) throw DomainError("scenario_metrics: empty bundle");
  m.n_paths = n;
  m.mean.resize(rows, 3);
  m.q05.resize(rows, 3);
  m.q95.resize(rows, 3);
  m.share.resize(rows);
  std::vector<double> scratch(n);
  for (int i = 0; i < rows; ++i) {
    const Eigen::VectorXd c1 = b.x1.col(i), c2 = b.x2.col(i);
    const Eigen::VectorXd tot = c1 + c2;
    const Eigen::VectorXd* cols[3] = {&c1, &c2, &tot};
    for (int c = 0; c < 3; ++c) {
      m.mean(i, c) = cols[c]->mean();
      Eigen::VectorXd::Map(scratch.data(), n) = *cols[c];
      m.q05(i, c) = quantile(scratch, 0.05);
      m.q95(i, c) = quantile(scratch, 0.95);
    }
    m.share(i) = m.mean(i, 1) / m.mean(i, 2);
  }
  const int last = rows - 1;
  const Eigen::VectorXd xT2 = b.x2.col(last);
  const Eigen::VectorXd totT = b.x1.col(last) + xT2;
  m.terminal_total = totT.mean();
  m.terminal_total_se = standard_error(totT);
  m.terminal_share = m.share(last);
  // Delta method for a ratio of means.
  m.terminal_share_se = standard_error(xT2 - m.terminal_share * totT) / std::abs(m.terminal_total);
  const Eigen::VectorXd pathwise = xT2.cwiseQuotient(totT);
  m.pathwise_share = pathwise.mean();
  m.pathwise_share_se = standard_error(pathwise);
  if (b.qv1.cols() > 0) {
    m.qv_rate(0) = b.qv1.sum() / n / grid.horizon();
    m.qv_rate(1) = b.qv2.sum() / n / grid.horizon();
  }
  m.negative_paths = static_cast<int>(std::count(b.went_negative.begin(), b.went_negative.end(), 1));
  return m;
}

}  // namespace incentive
