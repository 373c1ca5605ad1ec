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

#ifndef INCENTIVE_SCHEDULES_HPP
#define INCENTIVE_SCHEDULES_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace incentive {

// Second-best incentive functions on a time grid.  Columns of z are the
// stacked per-agent payment vectors (agent n, channel j at n * dim + j);
// gamma and vol hold one column per channel (the owning agent's diagonal
// volatility payment and the volatility it induces).
template <typename Scalar>
struct BasicPaymentSchedule {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  int agents = 1;
  int dim = 2;
  bool volatility_control = true;
  Vector times;
  Matrix z;
  Matrix gamma;
  Matrix vol;
  Matrix w_principal;
  Eigen::VectorXi iterations;
  Eigen::VectorXd residual;
  std::string method;

  int rows() const { return static_cast<int>(times.size()); }
  // Payment of agent n for channel j at row i.
  Scalar payment(int i, int n, int j) const { return z(i, n * dim + j); }
};

using PaymentSchedule = BasicPaymentSchedule<double>;

enum class Regime { BU, SB, FB };

struct ControlSchedule {
  Eigen::VectorXd times;
  Eigen::MatrixXd a;  // drift control per technology
  Eigen::MatrixXd b;  // volatility control per technology
  std::string tag;    // e.g. "M-SB-DVC"
};

// Rebate prices of one contract.  Money values (fixed) already include the
// energy scale; drift/vol prices are rates in table units.
struct FirmPrices {
  Eigen::MatrixXd drift;  // pi^D per channel
  Eigen::MatrixXd vol;    // pi^V per channel
  double fixed = 0.0;     // xi^F
  Eigen::Vector2d terminal_bonus = Eigen::Vector2d::Zero();
};

struct ContractPrices {
  Eigen::VectorXd times;
  Eigen::Vector2d baseline = Eigen::Vector2d::Zero();  // X0
  double energy_scale = 1.0;
  std::vector<FirmPrices> firms;
};

}  // namespace incentive

#endif  // INCENTIVE_SCHEDULES_HPP
