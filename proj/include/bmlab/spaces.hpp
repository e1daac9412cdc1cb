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

#ifndef BMLAB_SPACES_HPP
#define BMLAB_SPACES_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bmlab/rng.hpp"
#include "bmlab/signset.hpp"

namespace bmlab {

/// A norm on R^n of the form
///
///   ||a|| = max( max_i |phi_i . a| , ||L a||_2 )
///
/// where the phi_i are the rows of `functionals()` and L is `euclidean()`.
/// Either part may be empty: a pure polytopal norm has no Euclidean rows, the
/// ellipsoidal variant has no functionals, and the mixed case is the max of
/// both evaluators. Values are immutable; copies share the vertex cache.
class PolytopalSpace {
 public:
  PolytopalSpace() = default;
  explicit PolytopalSpace(Eigen::MatrixXd functionals, std::string label = {});
  PolytopalSpace(Eigen::MatrixXd functionals, Eigen::MatrixXd euclidean, std::string label);

  static PolytopalSpace Ellipsoidal(Eigen::MatrixXd shape, std::string label = {});

  int dim() const { return dim_; }
  const Eigen::MatrixXd& functionals() const { return functionals_; }
  const Eigen::MatrixXd& euclidean() const { return euclidean_; }
  const std::string& label() const { return label_; }

  bool has_functionals() const { return functionals_.rows() > 0; }
  bool has_euclidean() const { return euclidean_.rows() > 0; }
  bool is_polytopal() const { return !has_euclidean(); }
  bool is_ellipsoidal() const { return has_euclidean() && !has_functionals(); }

  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& a) const;

  /// Vertices of the unit ball of a polytopal space, one per +-pair (rows).
  /// Enumerated once on first use; guarded to small dimensions.
  const Eigen::MatrixXd& vertices() const;

  PolytopalSpace scaled(double factor) const;
  PolytopalSpace relabeled(std::string label) const;

 private:
  struct VertexCache;

  int dim_ = 0;
  Eigen::MatrixXd functionals_;
  Eigen::MatrixXd euclidean_;
  std::string label_;
  std::shared_ptr<VertexCache> cache_;
};

/// True when vertices() is within the enumeration guard.
bool vertices_available(const PolytopalSpace& space);

template <typename Derived>
double norm(const PolytopalSpace& space, const Eigen::MatrixBase<Derived>& a) {
  return space.evaluate(a);
}

PolytopalSpace linf_space(int n);
PolytopalSpace l1_space(int n);
PolytopalSpace l2_space(int n);

/// The space on R^k induced by X on the span of the columns of `basis` (m x k).
PolytopalSpace restrict_to(const PolytopalSpace& X, const Eigen::MatrixXd& basis, std::string label = {});

/// E_x: coordinates plus the correlations with the members of T indexed by x,
///   ||a|| = max( max_j |a_j| , max_{t in x} |<a,t>| ).
PolytopalSpace make_Ex(const SignSet& T, const std::vector<int>& x);

/// sup |a_j| <= ||a|| <= sum |a_j| for all a.
bool satisfies_unit_sandwich(const PolytopalSpace& space);

struct Support {
  double value = 0.0;
  Eigen::VectorXd argmax;
};

/// max { g.a : ||a|| <= 1 } and a maximizer. Polytopal spaces use vertex
/// enumeration up to dimension 6 and the simplex beyond; ellipsoidal spaces use
/// the closed form. Mixed norms are rejected.
Support support(const PolytopalSpace& space, const Eigen::VectorXd& g);

/// Norm of the functional f in the dual space.
double dual_norm(const PolytopalSpace& space, const Eigen::VectorXd& f);

/// The dual space realized on R^n: the polar of the unit ball.
PolytopalSpace dual_space(const PolytopalSpace& space);

struct AuerbachBasis {
  /// Columns are e_1..e_n.
  Eigen::MatrixXd basis;
  /// Rows are the dual functionals e_1*..e_n*.
  Eigen::MatrixXd dual;
  double quality = 0.0;
  double biorthogonality_residual = 0.0;
  double determinant = 0.0;
  int rounds = 0;
  bool converged = false;
};

/// Determinant-maximizing basis on the unit sphere (dim <= 6): a seeded
/// candidate pool (ball vertices plus random boundary points), a greedy
/// max-volume start, then single-vector coordinate ascent. Each ascent step is
/// exact because det is linear in the replaced vector, so the best replacement
/// is a support point of the cofactor functional.
AuerbachBasis auerbach_basis(const PolytopalSpace& space, std::uint64_t seed = 0, int max_rounds = 200);

struct BallNet {
  PolytopalSpace space;
  double xi = 0.0;
  /// One net point per row; the origin is always the first.
  Eigen::MatrixXd points;
  /// (1 + 2/xi)^n.
  double cardinality_bound = 0.0;
  std::int64_t pool_size = 0;
  bool grid_pool = true;

  Eigen::Index size() const { return points.rows(); }
};

/// Greedy maximal xi-separated subset of a dense pool of ball points (origin,
/// then ball vertices when available, then a grid of step xi/4 with outside
/// points pulled radially onto the sphere, or seeded random ball points when
/// the grid is too large).
BallNet ball_net(const PolytopalSpace& space, double xi, std::uint64_t seed = 0);

/// Index of the net point nearest to `a`, and the distance.
std::pair<Eigen::Index, double> nearest_net_point(const BallNet& net, const Eigen::VectorXd& a);

/// Largest distance from a seeded random ball point to the net.
double sampled_covering_radius(const BallNet& net, int samples, std::uint64_t seed);

/// Largest distance from a ball point on a grid of the given step to the net (dim <= 2).
double grid_covering_radius(const BallNet& net, double step);

/// Seeded uniform-ish point of the unit ball: random direction, radius U^(1/n).
Eigen::VectorXd random_ball_point(const PolytopalSpace& space, Rng& rng);

struct SubspaceNet {
  int n = 0;
  BallNet ball;
  /// (1 + xi n) / (1 - xi n).
  double radius = 0.0;
  /// |net|^n.
  double tuple_count = 0.0;
  /// (1 + 2/xi)^(n m).
  double cardinality_bound = 0.0;
  bool enumerated = false;
  /// Filled when enumerated: the linearly independent tuples and their spaces.
  std::vector<std::vector<int>> tuples;
  std::vector<PolytopalSpace> spaces;
  /// Tuples skipped as linearly dependent; -1 when not counted.
  std::int64_t degenerate = -1;
};

/// Net of n-dimensional subspaces of X from n-tuples of a xi-net of B_X.
/// Spaces are materialized when |net|^n <= 1e5; tuples are counted up to 1e7.
SubspaceNet subspace_net(int n, const PolytopalSpace& X, double xi, std::uint64_t seed = 0);

/// E_f: R^n with ||c|| = ||sum_j c_j f_j||_X for the net points indexed by `tuple`.
PolytopalSpace subspace_net_member(const SubspaceNet& net, const std::vector<int>& tuple);

struct SubspaceNetCheck {
  std::vector<int> tuple;
  /// max_j ||e_j - f_j||_X after snapping the Auerbach basis to the net.
  double snap_distance = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  /// [1 - snap n, 1 + snap n].
  double lower_factor = 0.0;
  double upper_factor = 0.0;
  bool within_factors = false;
  /// ratio_max / ratio_min: an upper bound for d(E, E_f) on the sampled directions.
  double observed_distance = 0.0;
  bool within_radius = false;
  int samples = 0;
};

/// Snaps an Auerbach basis of span(basis) to the net and samples the distortion.
SubspaceNetCheck verify_subspace_net(const SubspaceNet& net, const Eigen::MatrixXd& basis, int samples,
                                     std::uint64_t seed);

struct LinfEmbedding {
  double delta = 0.0;
  BallNet dual_net;
  /// Nonzero dual net points, one functional per row: x -> (t(x))_t.
  Eigen::MatrixXd functionals;
  int m = 0;
  /// floor((1 + 2/delta)^n).
  double m_bound = 0.0;
  /// (1 - delta)^-1.
  double distortion_bound = 0.0;
  /// F realized on R^n: ||x||_F = max_t |t(x)|.
  PolytopalSpace image;
};

/// l_inf^m embedding from a delta-net of the dual ball.
LinfEmbedding embed_linf(const PolytopalSpace& E, double delta, std::uint64_t seed = 0);

struct DistortionSample {
  /// max ||x||_F / ||x||_E and max ||x||_E / ||x||_F.
  double forward = 0.0;
  double backward = 0.0;
  double distortion = 0.0;
  int samples = 0;
};

DistortionSample sample_distortion(const PolytopalSpace& E, const PolytopalSpace& F, int samples,
                                   std::uint64_t seed);

/// One element (x_t, x_t*) of a biorthogonal system in E x E*.
struct BiorthogonalPair {
  Eigen::VectorXd vector;
  Eigen::VectorXd functional;
};

/// x_t = t / sqrt(n), x_t* = <., t> / sqrt(n) for the members of a sign set:
/// a valid system over l_2^n with C = 1.
std::vector<BiorthogonalPair> sign_system(const SignSet& T);

/// Checks ||x_t|| <= C, ||x_t*||_* <= C, x_t*(x_t) = 1, |x_s*(x_t)| <= theta.
/// Throws PreconditionError naming the first violated inequality.
void validate_system(const PolytopalSpace& E, const std::vector<BiorthogonalPair>& system, double theta,
                     double C);

struct LocalSpace {
  PolytopalSpace space;
  /// C^2 / theta.
  double distance_bound = 0.0;
  double lower_factor = 0.0;
  double upper_factor = 0.0;
};

/// ||a||_x = max( theta/C ||a||_E , max_{t in x} |x_t*(a)| ).
LocalSpace make_lemloc_space(const PolytopalSpace& E, const std::vector<BiorthogonalPair>& system, double theta,
                             double C, const std::vector<int>& x);

}  // namespace bmlab

#endif  // BMLAB_SPACES_HPP
