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

#ifndef BMLAB_BMDIST_HPP
#define BMLAB_BMDIST_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bmlab/loglevel.hpp"
#include "bmlab/signset.hpp"
#include "bmlab/spaces.hpp"

namespace bmlab {

/// ||u e_j||_F maximized over j: the norm of u from l_1^n into F.
double op_norm_from_l1(const Eigen::MatrixXd& u, const PolytopalSpace& F);

/// [||u: l_1 -> F||, n ||u: l_1 -> F||] for a source obeying the unit sandwich.
std::pair<double, double> op_norm_sandwich(const Eigen::MatrixXd& u, const PolytopalSpace& source,
                                           const PolytopalSpace& F);

/// Exact ||u: E -> F||. Routes: vertices of B_E (polytopal, dim <= 6), the
/// dual simplex over the functionals of F (polytopal E and F), closed forms
/// when E is ellipsoidal.
double operator_norm(const Eigen::MatrixXd& u, const PolytopalSpace& E, const PolytopalSpace& F);

/// ||u|| ||u^-1|| for u: E -> F; +inf when u is singular.
double map_distortion(const Eigen::MatrixXd& u, const PolytopalSpace& E, const PolytopalSpace& F);

struct LinearMapBetween {
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd inverse;
  PolytopalSpace source;
  PolytopalSpace target;
  double op_norm_lower = 0.0;
  double op_norm_upper = 0.0;
  double inverse_residual = 0.0;
};

/// Builds the map with its inverse and exact operator norm (lower == upper).
LinearMapBetween make_map(const Eigen::MatrixXd& u, const PolytopalSpace& source, const PolytopalSpace& target);

struct Certificate {
  enum class Kind { IdentityWitness, MapWitness };
  Kind kind = Kind::IdentityWitness;
  Eigen::VectorXd witness;
  /// Identity: ||w|| in the space where it is large. Map: ||w|| in the source.
  double source_norm = 0.0;
  /// Identity: ||w|| in the other space. Map: ||u w|| in the target.
  double target_norm = 0.0;
  double implied_ratio = 0.0;
  /// Map witnesses only.
  Eigen::MatrixXd map;
};

std::string to_string(Certificate::Kind kind);

/// Identity witness between two members x, y of an antichain over T: the first
/// s in x \ y in the order of T. source_norm = ||s||_{E_x} = n and
/// target_norm = ||s||_{E_y} <= theta n, so ||Id: E_y -> E_x|| >= ratio >= 1/theta.
Certificate identity_certificate(const std::vector<int>& x, const std::vector<int>& y, const SignSet& T);

/// Best identity witness among the given candidate vectors (one per row).
Certificate best_identity_witness(const PolytopalSpace& big, const PolytopalSpace& small,
                                  const Eigen::MatrixXd& candidates);

/// ||u w||_F / ||w||_E at a fixed vector: a lower bound for ||u: E -> F||.
Certificate map_witness(const Eigen::MatrixXd& u, const PolytopalSpace& E, const PolytopalSpace& F,
                        const Eigen::VectorXd& w);

/// Re-evaluates the stored norms; true when they reproduce to `tolerance`.
bool recheck_certificate(const Certificate& certificate, const PolytopalSpace& source,
                         const PolytopalSpace& target, double tolerance = 1e-12);

struct JohnEllipsoid {
  /// E = { a : ||shape a||_2 <= 1 }, centered at the origin.
  Eigen::MatrixXd shape;
  /// max ||a||_space over the ellipsoid (<= 1: the ellipsoid is inscribed).
  double inner_radius_factor = 0.0;
  /// Smallest c with B_space inside c E.
  double outer_radius_factor = 0.0;
  int iterations = 0;
  /// max_i kappa_i / n - 1 at termination.
  double duality_gap = 0.0;
};

/// Maximal-volume inscribed ellipsoid of a symmetric polytope (dim <= 6), via
/// the dual minimum-volume enclosing ellipsoid of the functionals (Fedorov-Wynn
/// with away steps, stopped at duality gap 1e-8). Ellipsoidal spaces return themselves.
JohnEllipsoid john_ellipsoid(const PolytopalSpace& space, int max_iterations = 100000);

struct UpperBound {
  double value = 0.0;
  Eigen::MatrixXd map;
  /// outer_E * outer_F when both John ellipsoids are available, else +inf.
  double john_bound = 0.0;
  std::string route;
  int evaluations = 0;
  int restarts = 0;
};

struct UpperBoundOptions {
  int effort = 32;
  std::uint64_t seed = 0;
  /// Stop as soon as a map with distortion below this is found (0: never).
  double stop_below = 0.0;
  /// Skip exact evaluation of candidates whose cheap witness bound is >= this (0: never).
  double skip_at_least = 0.0;
};

/// Heuristic upper bound on d(E, F): John route, identity and signed permutations,
/// then a seeded multistart pattern search over invertible matrices.
UpperBound bm_upper(const PolytopalSpace& E, const PolytopalSpace& F, const UpperBoundOptions& options = {});

/// Cheap lower bound for ||u|| ||u^-1|| from test vectors (rows of the functional
/// lists and coordinate vectors); stops once the product reaches `stop_at`.
double witness_lower_bound(const Eigen::MatrixXd& u, const PolytopalSpace& E, const PolytopalSpace& F,
                           double stop_at = 0.0);

struct Exact2dResult {
  /// Best distortion found: an upper bound on d(E, F).
  double value = 0.0;
  /// Certified lower bound from the branch-and-bound frontier.
  double lower = 0.0;
  bool certified = false;
  double tolerance = 0.0;
  Eigen::MatrixXd map;
  std::int64_t cells = 0;
  /// Lipschitz data for the report.
  double c_source = 0.0;
  double c_target = 0.0;
  double sigma_min = 0.0;
};

/// d(E, F) for 2-dimensional spaces by Lipschitz branch and bound over
/// u = R(phi) diag(1, s sigma) R(psi) after John normalization of both spaces.
/// Stops when upper - lower <= tol or the cell budget is exhausted.
Exact2dResult bm_exact_2d(const PolytopalSpace& E, const PolytopalSpace& F, double tol = 1e-3,
                          std::int64_t max_cells = 2000000);

struct PackingRejection {
  int index = 0;
  int close_to = 0;
  double distance_upper = 0.0;
};

struct PackingPair {
  int i = 0;
  int j = 0;
  /// ||Id: E_j -> E_i|| >= certificate.implied_ratio.
  Certificate certificate;
};

struct PackingResult {
  std::vector<int> accepted;
  std::vector<PackingRejection> rejected;
  std::vector<PackingPair> pairs;
  double r = 0.0;
  int effort = 0;
  /// Acceptance rests on a failed search; rejection rests on an explicit map.
  bool acceptance_heuristic = true;
};

using IdentityCertifier = std::function<Certificate(int i, int j)>;

/// Greedy maximal subfamily with pairwise distance >= r as far as bm_upper can tell.
/// The certifier supplies ||Id: E_j -> E_i|| witnesses for accepted pairs; the
/// default searches the functional rows of E_i.
PackingResult greedy_packing(const std::vector<PolytopalSpace>& family, double r, int effort,
                             std::uint64_t seed = 0, IdentityCertifier certifier = nullptr);

/// The same scan over E_x for members x of an antichain over T, certified by
/// identity_certificate.
PackingResult greedy_packing_Ex(const SignSet& T, const std::vector<std::vector<int>>& members, double r,
                                int effort, std::uint64_t seed = 0);

struct ClaimCount {
  double eta = 0.0;
  LogLevelNumber bound;
};

/// (1 + 4n/eta)^(n^2) with 1 + eta = 1/(r theta); requires r theta < 1.
ClaimCount claim_counter(int n, double r, double theta);

}  // namespace bmlab

#endif  // BMLAB_BMDIST_HPP
