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

#ifndef INCENTIVE_FIXED_POINT_HPP
#define INCENTIVE_FIXED_POINT_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "incentive/errors.hpp"

namespace incentive {

struct PicardOptions {
  double damping = 0.5;
  double tolerance = 1e-12;  // relative, |G(x) - x| / (1 + |x|)
  int max_iter = 500;
};

template <typename Vector>
struct PicardResult {
  Vector x;
  int iterations = 0;
  double residual = 0;
  std::vector<double> history;
};

template <typename DerivedA, typename DerivedB>
double relative_residual(const Eigen::MatrixBase<DerivedA>& image,
                         const Eigen::MatrixBase<DerivedB>& x) {
  using std::abs;
  double r = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double num = static_cast<double>(abs(image(i) - x(i)));
    const double den = 1.0 + static_cast<double>(abs(x(i)));
    r = std::max(r, num / den);
  }
  return r;
}

// Damped Picard iteration x <- (1 - theta) x + theta G(x).  theta is halved
// whenever the residual grows.  The returned x is the last point at which G
// was evaluated, so any side data captured by G corresponds to it.
template <typename Vector, typename Map>
PicardResult<Vector> damped_picard(Vector x, Map&& G, const PicardOptions& opt = {}) {
  PicardResult<Vector> out;
  double theta = opt.damping;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < opt.max_iter; ++k) {
    const Vector gx = G(x);
    const double r = relative_residual(gx, x);
    out.history.push_back(r);
    if (!std::isfinite(r)) throw ConvergenceError("damped Picard: non-finite iterate", r, k + 1);
    if (r <= opt.tolerance) {
      out.x = std::move(x);
      out.iterations = k + 1;
      out.residual = r;
      return out;
    }
    if (r > prev) theta *= 0.5;
    prev = r;
    using S = typename Vector::Scalar;
    x = S(1 - theta) * x + S(theta) * gx;
  }
  throw ConvergenceError("damped Picard did not converge", prev, opt.max_iter);
}

}  // namespace incentive

#endif  // INCENTIVE_FIXED_POINT_HPP
