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

#ifndef INCENTIVE_ERRORS_HPP
#define INCENTIVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace incentive {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Singular cost block or invertibility failure in the model data.
class DegenerateModelError : public std::runtime_error {
 public:
  DegenerateModelError(const std::string& what, double condition)
      : std::runtime_error(what + " (condition number " + std::to_string(condition) + ")"),
        condition_number(condition) {}
  double condition_number;
};

// Singular payment system at a specific (t, gamma).
class DegenerateSystemError : public std::runtime_error {
 public:
  DegenerateSystemError(const std::string& what, double condition)
      : std::runtime_error(what + " (condition number " + std::to_string(condition) + ")"),
        condition_number(condition) {}
  double condition_number;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_residual, int iters)
      : std::runtime_error(what + " (residual " + std::to_string(last_residual) + " after " +
                           std::to_string(iters) + " iterations)"),
        residual(last_residual),
        iterations(iters) {}
  double residual;
  int iterations;
};

class UnsupportedCaseError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace incentive

#endif  // INCENTIVE_ERRORS_HPP
