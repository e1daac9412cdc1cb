// Copyright 2026 The bmlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BMLAB_COMMON_HPP
#define BMLAB_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bmlab {

using Complex = std::complex<double>;

/// Thrown when an operation is called outside its domain.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a construction finishes but its postcondition does not hold.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a size/effort guard would be exceeded.
class ResourceGuardError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

namespace tol {
inline constexpr double kNormArithmetic = 1e-12;
inline constexpr double kBiorthogonality = 1e-9;
inline constexpr double kAuerbachQuality = 1e-6;
inline constexpr double kUnitarity = 1e-10;
inline constexpr double kCoherence = 1e-12;
}  // namespace tol

inline void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}

}  // namespace bmlab

#endif  // BMLAB_COMMON_HPP
