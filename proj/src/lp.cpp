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

#include "bmlab/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "bmlab/common.hpp"

namespace bmlab {

namespace {

constexpr double kFeasTol = 1e-11;
constexpr double kPivotTol = 1e-12;

}  // namespace

SupportResult polytope_support(const Eigen::MatrixXd& functionals, const Eigen::VectorXd& g) {
  const Eigen::Index m = functionals.rows();
  const Eigen::Index n = functionals.cols();
  require(g.size() == n, "polytope_support: dimension mismatch");
  SupportResult out;
  out.argmax = Eigen::VectorXd::Zero(n);
  out.weights = Eigen::VectorXd::Zero(m);
  if (n == 0 || g.isZero(0.0)) return out;

  // Starting basis: n independent functionals, chosen by pivoted QR of Phi^T.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(functionals.transpose());
  require(qr.rank() == n, "polytope_support: functionals do not span the dual space");
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) basis[k] = qr.colsPermutation().indices()(k);

  // Basic variable k carries |w_basis[k]| with sign sign[k].
  std::vector<double> sign(static_cast<std::size_t>(n), 1.0);
  Eigen::MatrixXd B(n, n);
  auto assemble = [&] {
    for (Eigen::Index k = 0; k < n; ++k) B.col(k) = sign[k] * functionals.row(basis[k]).transpose();
  };
  {
    for (Eigen::Index k = 0; k < n; ++k) B.col(k) = functionals.row(basis[k]).transpose();
    Eigen::VectorXd w = B.partialPivLu().solve(g);
    for (Eigen::Index k = 0; k < n; ++k) sign[k] = w(k) < 0 ? -1.0 : 1.0;
    assemble();
  }

  const int max_iter = static_cast<int>(50 * (m + n) + 100);
  int stall = 0;
  double last_objective = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    Eigen::VectorXd xB = lu.solve(g);
    for (Eigen::Index k = 0; k < n; ++k) xB(k) = std::max(xB(k), 0.0);
    // Simplex multipliers y solve B^T y = c_B = 1.
    Eigen::VectorXd y = lu.transpose().solve(Eigen::VectorXd::Ones(n));
    Eigen::VectorXd slack = functionals * y;

    const double objective = xB.sum();
    if (objective < last_objective - 1e-14) {
      stall = 0;
      last_objective = objective;
    } else {
      ++stall;
    }
    const bool bland = stall > 2 * n;

    // Entering column: a functional with |phi . y| > 1 (negative reduced cost).
    Eigen::Index enter = -1;
    double best = 1.0 + kFeasTol;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double v = std::abs(slack(i));
      if (v > best) {
        enter = i;
        if (bland) break;
        best = v;
      }
    }
    if (enter < 0) {
      out.value = g.dot(y);
      out.argmax = y;
      for (Eigen::Index k = 0; k < n; ++k) out.weights(basis[k]) += sign[k] * xB(k);
      out.iterations = iter;
      return out;
    }
    const double enter_sign = slack(enter) > 0 ? 1.0 : -1.0;
    Eigen::VectorXd column = enter_sign * functionals.row(enter).transpose();
    Eigen::VectorXd d = lu.solve(column);

    Eigen::Index leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n; ++k) {
      if (d(k) > kPivotTol) {
        const double r = xB(k) / d(k);
        if (r < ratio - 1e-15 || (bland && r <= ratio + 1e-15 && leave >= 0 && basis[k] < basis[leave])) {
          ratio = r;
          leave = k;
        }
      }
    }
    if (leave < 0) throw ConstructionError("polytope_support: unbounded (functionals not spanning)");
    basis[leave] = enter;
    sign[leave] = enter_sign;
    B.col(leave) = column;
  }
  throw ConstructionError("polytope_support: simplex iteration limit reached");
}

}  // namespace bmlab
