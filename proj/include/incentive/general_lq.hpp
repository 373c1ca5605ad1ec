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

#ifndef INCENTIVE_GENERAL_LQ_HPP
#define INCENTIVE_GENERAL_LQ_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "incentive/core_model.hpp"
#include "incentive/errors.hpp"
#include "incentive/fixed_point.hpp"
#include "incentive/schedules.hpp"

namespace incentive {

// N agents controlling a d-dimensional state
//   dX = (A0 X + sum_n A_n alpha^n) dt + diag(b) dW
// with agent n paying  L^n . alpha + alpha^T Q^n alpha / 2  (alpha stacked, dN)
// and the separable volatility cost family: channel j is steered by one
// agent at cost (b_j^-2 - sigma_j^-2) Phi_j.
template <typename Scalar>
struct GeneralModel {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  int d = 0;
  int N = 0;
  Matrix drift_state;                  // A0
  std::vector<Matrix> loading;         // A_n
  std::vector<Vector> state_cost;      // c0_n
  std::vector<Vector> linear_cost;     // L^n
  std::vector<Matrix> quadratic_cost;  // Q^n
  std::vector<int> vol_owner;          // agent steering channel j
  Vector vol_cost_scale;               // Phi_j
  Vector uncontrolled_vol;             // sigma_j
  Scalar vol_floor_ratio = Scalar(1e-3);
  bool volatility_control = true;
  std::vector<Scalar> risk_aversion;  // eta_n
  Scalar principal_risk_aversion = Scalar(0);
  Vector running_weight;  // lambda
  Vector terminal_bonus;  // Lambda
  Matrix qv_weight;       // g
};

// Block (n, j) of the equilibrium system is Q^n_{nj}.
template <typename Scalar>
typename GeneralModel<Scalar>::Matrix system_matrix(const GeneralModel<Scalar>& m) {
  const int d = m.d;
  typename GeneralModel<Scalar>::Matrix S(d * m.N, d * m.N);
  for (int n = 0; n < m.N; ++n)
    for (int j = 0; j < m.N; ++j) S.block(n * d, j * d, d, d) = m.quadratic_cost[n].block(n * d, j * d, d, d);
  return S;
}

template <typename Derived>
double condition_number(const Eigen::MatrixBase<Derived>& A) {
  using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::JacobiSVD<Matrix> svd{Matrix(A)};
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 1.0;
  const double lo = static_cast<double>(sv(sv.size() - 1));
  if (!(lo > 0)) return std::numeric_limits<double>::infinity();
  return static_cast<double>(sv(0)) / lo;
}

inline constexpr double kMaxCondition = 1e14;

template <typename Scalar>
void validate(const GeneralModel<Scalar>& m) {
  using Matrix = typename GeneralModel<Scalar>::Matrix;
  const int d = m.d, N = m.N, dn = m.d * m.N;
  if (d <= 0 || N <= 0) throw DomainError("GeneralModel: empty dimensions");
  auto sized = [](const auto& v, std::size_t n) { return v.size() == n; };
  if (!sized(m.loading, N) || !sized(m.state_cost, N) || !sized(m.linear_cost, N) ||
      !sized(m.quadratic_cost, N) || !sized(m.risk_aversion, N) || !sized(m.vol_owner, d))
    throw DomainError("GeneralModel: per-agent data has wrong length");
  if (m.drift_state.rows() != d || m.drift_state.cols() != d || m.running_weight.size() != d ||
      m.terminal_bonus.size() != d || m.qv_weight.rows() != d || m.qv_weight.cols() != d ||
      m.vol_cost_scale.size() != d || m.uncontrolled_vol.size() != d)
    throw DomainError("GeneralModel: state data has wrong shape");
  for (int n = 0; n < N; ++n) {
    if (m.quadratic_cost[n].rows() != dn || m.quadratic_cost[n].cols() != dn ||
        m.linear_cost[n].size() != dn)
      throw DomainError("GeneralModel: cost data has wrong shape");
    const Matrix own = m.quadratic_cost[n].block(n * d, n * d, d, d);
    Eigen::LLT<Matrix> llt(own);
    if (llt.info() != Eigen::Success)
      throw DegenerateModelError("GeneralModel: own cost block is not positive definite", condition_number(own));
    if (m.risk_aversion[n] < Scalar(0)) throw DomainError("GeneralModel: negative risk aversion");
  }
  for (int j = 0; j < d; ++j) {
    if (m.vol_owner[j] < 0 || m.vol_owner[j] >= N) throw DomainError("GeneralModel: bad volatility owner");
    if (!(m.vol_cost_scale(j) > Scalar(0)) || !(m.uncontrolled_vol(j) > Scalar(0)))
      throw DomainError("GeneralModel: volatility cost data must be positive");
  }
  if (!(m.principal_risk_aversion >= Scalar(0))) throw DomainError("GeneralModel: negative principal risk aversion");
  if ((m.qv_weight - m.qv_weight.transpose()).cwiseAbs().maxCoeff() > Scalar(0))
    throw DomainError("GeneralModel: g must be symmetric");
  const double cond = condition_number(system_matrix(m));
  if (!(cond < kMaxCondition)) throw DegenerateModelError("GeneralModel: equilibrium system is singular", cond);
}

// Stacked Nash drift equilibrium for shadow payments s^n (z^n or w^A_n):
// alpha = Qsys^-1 (A_n^T s^n - L^n_n)_n.
template <typename Scalar>
typename GeneralModel<Scalar>::Vector nash_drift_equilibrium(
    const std::vector<typename GeneralModel<Scalar>::Vector>& shadow, const GeneralModel<Scalar>& m) {
  using Vector = typename GeneralModel<Scalar>::Vector;
  const int d = m.d;
  if (static_cast<int>(shadow.size()) != m.N) throw DomainError("nash_drift_equilibrium: need one shadow vector per agent");
  const auto Qs = system_matrix(m);
  const double cond = condition_number(Qs);
  if (!(cond < kMaxCondition)) throw DegenerateModelError("nash_drift_equilibrium: singular equilibrium system", cond);
  Vector u(d * m.N);
  for (int n = 0; n < m.N; ++n)
    u.segment(n * d, d) = m.loading[n].transpose() * shadow[n] - m.linear_cost[n].segment(n * d, d);
  return Qs.partialPivLu().solve(u);
}

template <typename Scalar>
struct VolResponse {
  Scalar b;
  bool interior;  // false when clamped or when gamma >= 0
};

// b^2 = sqrt(2 Phi / -gamma) on [b_floor^2, sigma^2].
template <typename Scalar>
VolResponse<Scalar> vol_best_response(Scalar gamma, Scalar Phi, Scalar sigma,
                                      Scalar floor_ratio = Scalar(1e-3)) {
  using std::sqrt;
  if (!(Phi > Scalar(0))) throw DomainError("vol_best_response: Phi must be positive");
  if (!(gamma < Scalar(0))) return {sigma, false};
  const Scalar b2 = sqrt(Scalar(2) * Phi / -gamma);
  const Scalar lo = floor_ratio * sigma;
  if (b2 >= sigma * sigma) return {sigma, false};
  if (b2 <= lo * lo) return {lo, false};
  return {sqrt(b2), true};
}

// sup over B in [b_floor^2 / 2, sigma^2 / 2] of  B M - (1/(2B) - sigma^-2) Phi.
template <typename Scalar>
Scalar phi_star(Scalar M, Scalar Phi, Scalar sigma, Scalar floor_ratio = Scalar(1e-3)) {
  using std::sqrt;
  const Scalar lo = Scalar(0.5) * floor_ratio * floor_ratio * sigma * sigma;
  const Scalar hi = Scalar(0.5) * sigma * sigma;
  auto value = [&](Scalar B) { return B * M - (Scalar(0.5) / B - Scalar(1) / (sigma * sigma)) * Phi; };
  if (M >= Scalar(0)) return value(hi);
  const Scalar B = std::clamp(sqrt(Phi / (Scalar(-2) * M)), lo, hi);
  return value(B);
}

// M-hat(z, t) = g - sum_n eta_n z^n z^n^T - eta_P (w - sum z)(w - sum z)^T.
template <typename Scalar>
typename GeneralModel<Scalar>::Matrix m_hat(const typename GeneralModel<Scalar>::Vector& z,
                                            const typename GeneralModel<Scalar>::Vector& wP,
                                            const GeneralModel<Scalar>& m) {
  using Vector = typename GeneralModel<Scalar>::Vector;
  const int d = m.d;
  typename GeneralModel<Scalar>::Matrix M = m.qv_weight;
  Vector total = Vector::Zero(d);
  for (int n = 0; n < m.N; ++n) {
    const Vector zn = z.segment(n * d, d);
    M.noalias() -= m.risk_aversion[n] * zn * zn.transpose();
    total += zn;
  }
  const Vector gap = wP - total;
  M.noalias() -= m.principal_risk_aversion * gap * gap.transpose();
  return M;
}

// Channel variances b_j^2 induced by the owners' diagonal volatility payments.
template <typename Scalar>
typename GeneralModel<Scalar>::Vector channel_variance(const typename GeneralModel<Scalar>::Vector& gamma,
                                                       const GeneralModel<Scalar>& m) {
  typename GeneralModel<Scalar>::Vector S(m.d);
  for (int j = 0; j < m.d; ++j) {
    const Scalar b = m.volatility_control
                         ? vol_best_response(gamma(j), m.vol_cost_scale(j), m.uncontrolled_vol(j), m.vol_floor_ratio).b
                         : m.uncontrolled_vol(j);
    S(j) = b * b;
  }
  return S;
}

template <typename Scalar>
struct ZSystem {
  using Matrix = typename GeneralModel<Scalar>::Matrix;
  using Vector = typename GeneralModel<Scalar>::Vector;

  Matrix zz;                 // dN x dN, block (n, h) = Z^z_{n,h}
  std::vector<Matrix> zeta;  // Z^z_{n,n}
  std::vector<Matrix> zw;    // Z^w_n
  std::vector<Vector> zc;    // Z^c_n
  Vector rhs;                // Z^w_n w^P - Z^c_n stacked
  double condition = 1.0;

  Vector solve() const { return zz.partialPivLu().solve(rhs); }
};

// Caches the gamma-independent parts of the payment system.
template <typename Scalar>
class ZAssembler {
 public:
  using Matrix = typename GeneralModel<Scalar>::Matrix;
  using Vector = typename GeneralModel<Scalar>::Vector;

  explicit ZAssembler(const GeneralModel<Scalar>& m) : m_(m) {
    validate(m);
    const int d = m.d, N = m.N, dn = d * N;
    const Matrix P = system_matrix(m).inverse();
    Matrix Qbar = Matrix::Zero(dn, dn);
    Vector Lbar = Vector::Zero(dn), Lown(dn);
    for (int n = 0; n < N; ++n) {
      Qbar += m.quadratic_cost[n];
      Lbar += m.linear_cost[n];
      Lown.segment(n * d, d) = m.linear_cost[n].segment(n * d, d);
    }
    // Rows of G_n = dalpha/dz^n: block j is P_{jn} A_n^T.
    std::vector<Matrix> G(N);
    for (int n = 0; n < N; ++n) G[n] = P.middleCols(n * d, d) * m.loading[n].transpose();
    Matrix Aall(d, dn);  // [A_1 ... A_N]
    for (int j = 0; j < N; ++j) Aall.middleCols(j * d, d) = m.loading[j];
    const Vector alpha0 = P * Lown;

    base_zz_.resize(dn, dn);
    base_zw_.resize(N);
    zc_.resize(N);
    for (int n = 0; n < N; ++n) {
      for (int h = 0; h < N; ++h) base_zz_.block(n * d, h * d, d, d) = G[n].transpose() * Qbar * G[h];
      base_zw_[n] = G[n].transpose() * Aall.transpose();
      zc_[n] = G[n].transpose() * (Lbar - Qbar * alpha0);
    }
  }

  ZSystem<Scalar> assemble(const Vector& variance, const Vector& wP) const {
    const int d = m_.d, N = m_.N;
    ZSystem<Scalar> sys;
    sys.zz = base_zz_;
    sys.zeta.resize(N);
    sys.zw.resize(N);
    sys.zc = zc_;
    sys.rhs.resize(d * N);
    const Matrix S = variance.asDiagonal();
    const Scalar etaP = m_.principal_risk_aversion;
    for (int n = 0; n < N; ++n) {
      for (int h = 0; h < N; ++h) {
        const Scalar eta = (h == n) ? m_.risk_aversion[n] + etaP : etaP;
        sys.zz.block(n * d, h * d, d, d) += eta * S;
      }
      sys.zeta[n] = sys.zz.block(n * d, n * d, d, d);
      sys.zw[n] = base_zw_[n] + etaP * S;
      sys.rhs.segment(n * d, d) = sys.zw[n] * wP - zc_[n];
    }
    sys.condition = condition_number(sys.zz);
    if (!(sys.condition < kMaxCondition))
      throw DegenerateSystemError("payment system is singular", sys.condition);
    return sys;
  }

  const GeneralModel<Scalar>& model() const { return m_; }

 private:
  const GeneralModel<Scalar>& m_;
  Matrix base_zz_;
  std::vector<Matrix> base_zw_;
  std::vector<Vector> zc_;
};

// gamma: one d x d volatility payment matrix per agent.
template <typename Scalar>
ZSystem<Scalar> assemble_z_system(const std::vector<typename GeneralModel<Scalar>::Matrix>& gamma,
                                  const GeneralModel<Scalar>& m,
                                  const typename GeneralModel<Scalar>::Vector& wP) {
  typename GeneralModel<Scalar>::Vector g(m.d);
  for (int j = 0; j < m.d; ++j) g(j) = gamma.at(m.vol_owner[j])(j, j);
  return ZAssembler<Scalar>(m).assemble(channel_variance(g, m), wP);
}

// Gradient of the principal's pointwise objective in the stacked payments at
// fixed channel variances; zero at the optimum.
template <typename Scalar>
typename GeneralModel<Scalar>::Vector principal_gradient(const typename GeneralModel<Scalar>::Vector& z,
                                                         const typename GeneralModel<Scalar>::Vector& variance,
                                                         const GeneralModel<Scalar>& m,
                                                         const typename GeneralModel<Scalar>::Vector& wP) {
  using Matrix = typename GeneralModel<Scalar>::Matrix;
  using Vector = typename GeneralModel<Scalar>::Vector;
  const int d = m.d, N = m.N, dn = d * N;
  std::vector<Vector> shadow(N);
  for (int n = 0; n < N; ++n) shadow[n] = z.segment(n * d, d);
  const Vector alpha = nash_drift_equilibrium(shadow, m);
  Matrix Qbar = Matrix::Zero(dn, dn);
  Vector Lbar = Vector::Zero(dn);
  for (int n = 0; n < N; ++n) {
    Qbar += m.quadratic_cost[n];
    Lbar += m.linear_cost[n];
  }
  // d/dalpha of  w . sum_j A_j alpha^j - sum_k c_k(alpha)
  Vector dalpha(dn);
  for (int j = 0; j < N; ++j) dalpha.segment(j * d, d) = m.loading[j].transpose() * wP;
  dalpha -= Lbar + Qbar * alpha;
  const Matrix P = system_matrix(m).inverse();
  Vector total = Vector::Zero(d);
  for (int n = 0; n < N; ++n) total += z.segment(n * d, d);
  const Vector gap = wP - total;
  Vector grad(dn);
  for (int n = 0; n < N; ++n) {
    const Matrix Gn = P.middleCols(n * d, d) * m.loading[n].transpose();
    grad.segment(n * d, d) = Gn.transpose() * dalpha -
                             m.risk_aversion[n] * variance.cwiseProduct(z.segment(n * d, d)) +
                             m.principal_risk_aversion * variance.cwiseProduct(gap);
  }
  return grad;
}

template <typename Scalar>
struct PointSolution {
  typename GeneralModel<Scalar>::Vector z;
  typename GeneralModel<Scalar>::Vector gamma;  // channel payments
  typename GeneralModel<Scalar>::Vector vol;
  int iterations = 0;
  double residual = 0;
  std::vector<double> history;
};

// Initial channel payments: risk-sharing split of w^P given to the owner.
template <typename Scalar>
typename GeneralModel<Scalar>::Vector initial_payments(const GeneralModel<Scalar>& m,
                                                       const typename GeneralModel<Scalar>::Vector& wP) {
  typename GeneralModel<Scalar>::Vector z = GeneralModel<Scalar>::Vector::Zero(m.d * m.N);
  const Scalar etaP = m.principal_risk_aversion;
  for (int j = 0; j < m.d; ++j) {
    const int n = m.vol_owner[j];
    const Scalar den = etaP + m.risk_aversion[n];
    z(n * m.d + j) = den > Scalar(0) ? etaP / den * wP(j) : wP(j);
  }
  return z;
}

// Pointwise second-best payments: gamma_j = m-hat_jj(z(gamma)).
template <typename Scalar>
PointSolution<Scalar> sb_point_general(const ZAssembler<Scalar>& za,
                                       const typename GeneralModel<Scalar>::Vector& wP,
                                       const PicardOptions& opt = {},
                                       const typename GeneralModel<Scalar>::Vector* warm = nullptr) {
  using Vector = typename GeneralModel<Scalar>::Vector;
  const auto& m = za.model();
  Vector gamma0 = warm ? *warm : Vector(m_hat<Scalar>(initial_payments(m, wP), wP, m).diagonal());
  Vector z_last;
  auto G = [&](const Vector& gamma) -> Vector {
    z_last = za.assemble(channel_variance(gamma, m), wP).solve();
    return m_hat<Scalar>(z_last, wP, m).diagonal();
  };
  auto res = damped_picard(gamma0, G, opt);
  PointSolution<Scalar> out;
  out.z = z_last;
  out.gamma = res.x;
  out.vol = channel_variance(res.x, m).cwiseSqrt();
  out.iterations = res.iterations;
  out.residual = res.residual;
  out.history = std::move(res.history);
  return out;
}

template <typename Scalar>
BasicPaymentSchedule<Scalar> sb_fixed_point_general(const GeneralModel<Scalar>& m, const TimeGrid& grid,
                                                    const PicardOptions& opt = {}) {
  using Matrix = typename GeneralModel<Scalar>::Matrix;
  using Vector = typename GeneralModel<Scalar>::Vector;
  const ZAssembler<Scalar> za(m);
  const int d = m.d, rows = grid.size();

  Vector source = -m.running_weight;
  for (int n = 0; n < m.N; ++n) source += m.state_cost[n];
  const Matrix W = solve_w_backward<Scalar>(m.drift_state, source, m.terminal_bonus, grid);

  BasicPaymentSchedule<Scalar> s;
  s.agents = m.N;
  s.dim = d;
  s.volatility_control = m.volatility_control;
  s.times = grid.times().template cast<Scalar>();
  s.z.resize(rows, d * m.N);
  s.gamma.resize(rows, d);
  s.vol.resize(rows, d);
  s.w_principal = W;
  s.iterations.resize(rows);
  s.residual.resize(rows);
  s.method = "general";
  // Sequential sweep backward from T, warm-started from the neighbour.
  Vector warm;
  for (int i = rows - 1; i >= 0; --i) {
    const Vector wP = W.row(i).transpose();
    const auto sol = sb_point_general(za, wP, opt, i == rows - 1 ? nullptr : &warm);
    warm = sol.gamma;
    s.z.row(i) = sol.z.transpose();
    s.gamma.row(i) = sol.gamma.transpose();
    s.vol.row(i) = sol.vol.transpose();
    s.iterations(i) = sol.iterations;
    s.residual(i) = sol.residual;
  }
  return s;
}

// Embeddings of the two-technology markets.  Risk aversions are multiplied by
// the energy scale so that all payment quantities stay in table units.
GeneralModel<double> embed_monopoly(const MarketSpec& spec, double energy_scale, bool volatility_control = true);
GeneralModel<double> embed_duopoly(const MarketSpec& spec, double energy_scale, bool volatility_control = true,
                                   double idle_cost = 1.0);

}  // namespace incentive

#endif  // INCENTIVE_GENERAL_LQ_HPP
