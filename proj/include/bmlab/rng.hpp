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

#ifndef BMLAB_RNG_HPP
#define BMLAB_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace bmlab {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives an operation-level seed from (master, module, operation, call index).
/// Streams for distinct keys are independent, so appending experiments never
/// shifts the seeds of earlier ones.
std::uint64_t derive_seed(std::uint64_t master, std::string_view module,
                          std::string_view operation, std::uint64_t call_index = 0);

/// Seed for worker/stream `index` under `seed`.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

/// Uniform point on the Euclidean unit sphere of R^n.
Eigen::VectorXd random_unit_vector(Eigen::Index n, Rng& rng);

/// Standard Gaussian vector (i.i.d. N(0,1) entries).
Eigen::VectorXd gaussian_vector(Eigen::Index n, Rng& rng);

}  // namespace bmlab

#endif  // BMLAB_RNG_HPP
