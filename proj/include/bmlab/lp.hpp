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

#ifndef BMLAB_LP_HPP
#define BMLAB_LP_HPP

#include <Eigen/Dense>

namespace bmlab {

struct SupportResult {
  double value = 0.0;
  /// Maximizer a with |functionals * a| <= 1.
  Eigen::VectorXd argmax;
  /// l1-minimal weights w with functionals^T w = g; sum |w| == value.
  Eigen::VectorXd weights;
  int iterations = 0;
};

/// max { g.a : |phi_i . a| <= 1 for all rows phi_i } for a full-column-rank
/// functional matrix. Solved as the dual problem min ||w||_1 s.t. Phi^T w = g
/// by a revised simplex whose multipliers are the primal maximizer.
SupportResult polytope_support(const Eigen::MatrixXd& functionals, const Eigen::VectorXd& g);

}  // namespace bmlab

#endif  // BMLAB_LP_HPP
