/*
 * Copyright 2026 The crbart Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CRBART_COMMON_H_
#define CRBART_COMMON_H_

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <string>

namespace crbart {

// Row-major so that a covariate vector is a contiguous span.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> RowSpan(const Matrix& m, Eigen::Index row) {
  return {m.data() + row * m.cols(), static_cast<std::size_t>(m.cols())};
}

// Base for all recoverable errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user input: bad dimensions, malformed files, invalid configs.
class InputError : public Error {
 public:
  using Error::Error;
};

// Binary response that is all 0 or all 1, or a sub-dataset with no events.
class DegenerateOutcomeError : public InputError {
 public:
  using InputError::InputError;
};

// Artifact version mismatch, truncated or tampered model files.
class FormatError : public InputError {
 public:
  using InputError::InputError;
};

// Numeric failure at run time (non-finite values, failed root finding).
class NumericError : public Error {
 public:
  using Error::Error;
};

// Caller broke an API precondition that is not about data, e.g. asking for a
// variance draw from a probit chain.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace crbart

#endif  // CRBART_COMMON_H_
