/*
 * Copyright 2026 The kpath Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef KPATH_ERRORS_HPP_
#define KPATH_ERRORS_HPP_

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace kpath {

namespace detail {
inline std::string sci(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}
}  // namespace detail

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments or parameters (bad kernel spec, out-of-range index, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Artifact content hash or format tag does not match.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Base for failures of a numerical procedure on valid input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PivotError : public NumericalError {
 public:
  PivotError(std::size_t node_index, double residual, double diagonal)
      : NumericalError("pivot failure at node " + std::to_string(node_index) +
                       ": residual " + detail::sci(residual) +
                       " below 1e-12 * C(x,x) = " +
                       detail::sci(1e-12 * diagonal)),
        node_index_(node_index),
        residual_(residual) {}

  std::size_t node_index() const { return node_index_; }
  double residual() const { return residual_; }

 private:
  std::size_t node_index_;
  double residual_;
};

class QuadratureError : public NumericalError {
 public:
  explicit QuadratureError(double error_estimate)
      : NumericalError("quadrature did not converge, error estimate " +
                       detail::sci(error_estimate)),
        error_estimate_(error_estimate) {}

  double error_estimate() const { return error_estimate_; }

 private:
  double error_estimate_;
};

class EigenSolverError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Derivative order too high for the kernel smoothness.
class AdmissibilityError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Richardson extrapolation estimates disagree.
class InstabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace kpath

#endif  // KPATH_ERRORS_HPP_
