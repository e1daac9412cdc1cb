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

#include "bmlab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

#include "bmlab/common.hpp"
#include "bmlab/lp.hpp"

namespace bmlab {

namespace {

constexpr int kMaxVertexDim = 6;
constexpr double kMaxVertexSystems = 5e6;
constexpr double kVertexFeasTol = 1e-9;
constexpr double kMaxNetBound = 1e6;
constexpr std::int64_t kMaxGridPool = 200000;
constexpr std::int64_t kRandomPool = 200000;

bool vertex_enumeration_feasible(Eigen::Index m, Eigen::Index n) {
  if (n > kMaxVertexDim || m < n) return false;
  const double log_systems = log_binomial(static_cast<int>(m), static_cast<int>(n)) + (n - 1) * std::log(2.0);
  return log_systems <= std::log(kMaxVertexSystems);
}

void canonicalize_sign(Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

Eigen::MatrixXd enumerate_vertices(const Eigen::MatrixXd& phi) {
  const Eigen::Index m = phi.rows();
  const Eigen::Index n = phi.cols();
  if (!vertex_enumeration_feasible(m, n)) {
    throw ResourceGuardError("vertex enumeration: dimension/functional count exceeds the guard");
  }
  std::vector<Eigen::VectorXd> found;
  auto add = [&](Eigen::VectorXd v) {
    canonicalize_sign(v);
    for (const auto& w : found) {
      if ((w - v).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, v.cwiseAbs().maxCoeff())) return;
    }
    found.push_back(std::move(v));
  };

  std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), 0);
  Eigen::MatrixXd system(n, n);
  const std::uint64_t sign_patterns = 1ULL << (n - 1);
  while (true) {
    for (Eigen::Index k = 0; k < n; ++k) system.row(k) = phi.row(rows[static_cast<std::size_t>(k)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (lu.rank() == n) {
      Eigen::VectorXd rhs(n);
      for (std::uint64_t pattern = 0; pattern < sign_patterns; ++pattern) {
        rhs(0) = 1.0;
        for (Eigen::Index k = 1; k < n; ++k) rhs(k) = ((pattern >> (k - 1)) & 1ULL) ? -1.0 : 1.0;
        Eigen::VectorXd v = lu.solve(rhs);
        if ((phi * v).cwiseAbs().maxCoeff() <= 1.0 + kVertexFeasTol) add(std::move(v));
      }
    }
    Eigen::Index i = n - 1;
    while (i >= 0 && rows[static_cast<std::size_t>(i)] == m - n + i) --i;
    if (i < 0) break;
    ++rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < n; ++j) rows[static_cast<std::size_t>(j)] = rows[static_cast<std::size_t>(j) - 1] + 1;
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(found.size()), n);
  for (std::size_t r = 0; r < found.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = found[r].transpose();
  return out;
}

// Upper triangular R with ||L a|| = ||R a||.
Eigen::MatrixXd euclidean_factor(const Eigen::MatrixXd& L) {
  const Eigen::Index n = L.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(L);
  Eigen::MatrixXd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  return R;
}

// Half-width of the ball along coordinate j (an upper bound for mixed norms).
double coordinate_extent(const PolytopalSpace& space, Eigen::Index j) {
  Eigen::VectorXd e = Eigen::VectorXd::Unit(space.dim(), j);
  if (!space.has_euclidean() || !space.has_functionals()) return support(space, e).value;
  double best = std::numeric_limits<double>::infinity();
  PolytopalSpace ell = PolytopalSpace::Ellipsoidal(space.euclidean());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(space.euclidean());
  if (lu.rank() == space.dim()) best = std::min(best, support(ell, e).value);
  Eigen::FullPivLU<Eigen::MatrixXd> lu2(space.functionals());
  if (lu2.rank() == space.dim()) best = std::min(best, support(PolytopalSpace(space.functionals()), e).value);
  return best;
}

}  // namespace

struct PolytopalSpace::VertexCache {
  std::once_flag once;
  Eigen::MatrixXd vertices;
  std::exception_ptr error;
};

PolytopalSpace::PolytopalSpace(Eigen::MatrixXd functionals, std::string label)
    : PolytopalSpace(functionals, Eigen::MatrixXd(0, functionals.cols()), std::move(label)) {}

PolytopalSpace::PolytopalSpace(Eigen::MatrixXd functionals, Eigen::MatrixXd euclidean, std::string label)
    : dim_(static_cast<int>(functionals.cols())),
      functionals_(std::move(functionals)),
      euclidean_(std::move(euclidean)),
      label_(std::move(label)),
      cache_(std::make_shared<VertexCache>()) {
  require(euclidean_.cols() == dim_, "PolytopalSpace: functional and Euclidean parts differ in dimension");
  require(dim_ >= 1, "PolytopalSpace: dimension must be positive");
  Eigen::MatrixXd stacked(functionals_.rows() + euclidean_.rows(), dim_);
  stacked << functionals_, euclidean_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked);
  require(qr.rank() == dim_, "PolytopalSpace: functionals do not span the dual space (not a norm)");
}

PolytopalSpace PolytopalSpace::Ellipsoidal(Eigen::MatrixXd shape, std::string label) {
  const Eigen::Index n = shape.cols();
  return PolytopalSpace(Eigen::MatrixXd(0, n), std::move(shape), std::move(label));
}

double PolytopalSpace::evaluate(const Eigen::Ref<const Eigen::VectorXd>& a) const {
  if (a.size() != dim_) {
    std::ostringstream msg;
    msg << "norm: vector of dimension " << a.size() << " in a space of dimension " << dim_;
    throw PreconditionError(msg.str());
  }
  double value = 0.0;
  if (has_functionals()) value = (functionals_ * a).cwiseAbs().maxCoeff();
  if (has_euclidean()) value = std::max(value, (euclidean_ * a).norm());
  return value;
}

const Eigen::MatrixXd& PolytopalSpace::vertices() const {
  require(is_polytopal(), "vertices: the unit ball is not a polytope");
  std::call_once(cache_->once, [this] {
    try {
      cache_->vertices = enumerate_vertices(functionals_);
    } catch (...) {
      cache_->error = std::current_exception();
    }
  });
  if (cache_->error) std::rethrow_exception(cache_->error);
  return cache_->vertices;
}

PolytopalSpace PolytopalSpace::scaled(double factor) const {
  require(factor > 0, "scaled: factor must be positive");
  return PolytopalSpace(functionals_ * factor, euclidean_ * factor, label_);
}

PolytopalSpace PolytopalSpace::relabeled(std::string label) const {
  PolytopalSpace copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

bool vertices_available(const PolytopalSpace& space) {
  return space.is_polytopal() && vertex_enumeration_feasible(space.functionals().rows(), space.dim());
}

PolytopalSpace linf_space(int n) {
  require(n >= 1, "linf_space: n must be positive");
  return PolytopalSpace(Eigen::MatrixXd::Identity(n, n), "l_inf^" + std::to_string(n));
}

PolytopalSpace l1_space(int n) {
  require(n >= 1 && n <= 20, "l1_space: need 1 <= n <= 20");
  const std::uint64_t rows = 1ULL << (n - 1);
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(rows), n);
  for (std::uint64_t r = 0; r < rows; ++r) {
    phi(static_cast<Eigen::Index>(r), 0) = 1.0;
    for (int j = 1; j < n; ++j) phi(static_cast<Eigen::Index>(r), j) = ((r >> (j - 1)) & 1ULL) ? -1.0 : 1.0;
  }
  return PolytopalSpace(std::move(phi), "l_1^" + std::to_string(n));
}

PolytopalSpace l2_space(int n) {
  require(n >= 1, "l2_space: n must be positive");
  return PolytopalSpace::Ellipsoidal(Eigen::MatrixXd::Identity(n, n), "l_2^" + std::to_string(n));
}

PolytopalSpace restrict_to(const PolytopalSpace& X, const Eigen::MatrixXd& basis, std::string label) {
  require(basis.rows() == X.dim(), "restrict_to: basis rows must equal dim X");
  return PolytopalSpace(X.functionals() * basis, X.euclidean() * basis, std::move(label));
}

PolytopalSpace make_Ex(const SignSet& T, const std::vector<int>& x) {
  const int n = T.n;
  std::set<int> seen;
  for (int idx : x) {
    if (idx < 0 || idx >= T.size()) throw PreconditionError("make_Ex: x is not contained in T");
    if (!seen.insert(idx).second) throw PreconditionError("make_Ex: x lists a member twice");
  }
  Eigen::MatrixXd phi(n + static_cast<Eigen::Index>(x.size()), n);
  phi.topRows(n).setIdentity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    phi.row(n + static_cast<Eigen::Index>(k)) = T.vectors.row(x[k]).cast<double>();
  }
  return PolytopalSpace(std::move(phi), "E_x");
}

bool satisfies_unit_sandwich(const PolytopalSpace& space) {
  const int n = space.dim();
  // Upper half: every ||e_j|| <= 1.
  for (int j = 0; j < n; ++j) {
    if (space.evaluate(Eigen::VectorXd::Unit(n, j)) > 1.0 + tol::kNormArithmetic) return false;
  }
  // Lower half: every coordinate functional has dual norm <= 1. Fast path when
  // +-e_j* is itself one of the functionals.
  for (int j = 0; j < n; ++j) {
    bool present = false;
    for (Eigen::Index i = 0; i < space.functionals().rows() && !present; ++i) {
      Eigen::RowVectorXd row = space.functionals().row(i).cwiseAbs();
      present = std::abs(row(j) - 1.0) <= tol::kNormArithmetic && row.sum() - row(j) <= tol::kNormArithmetic;
    }
    if (present) continue;
    if (space.has_euclidean() && space.has_functionals()) return false;
    if (dual_norm(space, Eigen::VectorXd::Unit(n, j)) > 1.0 + tol::kNormArithmetic) return false;
  }
  return true;
}

Support support(const PolytopalSpace& space, const Eigen::VectorXd& g) {
  require(g.size() == space.dim(), "support: dimension mismatch");
  Support out;
  if (space.is_polytopal()) {
    if (vertex_enumeration_feasible(space.functionals().rows(), space.dim())) {
      const Eigen::MatrixXd& v = space.vertices();
      Eigen::VectorXd values = v * g;
      Eigen::Index best = 0;
      values.cwiseAbs().maxCoeff(&best);
      out.value = std::abs(values(best));
      out.argmax = values(best) >= 0 ? Eigen::VectorXd(v.row(best).transpose()) : Eigen::VectorXd(-v.row(best).transpose());
      return out;
    }
    SupportResult lp = polytope_support(space.functionals(), g);
    out.value = lp.value;
    out.argmax = lp.argmax;
    return out;
  }
  if (space.is_ellipsoidal()) {
    Eigen::MatrixXd R = euclidean_factor(space.euclidean());
    Eigen::VectorXd h = R.transpose().triangularView<Eigen::Lower>().solve(g);
    out.value = h.norm();
    if (out.value == 0.0) {
      out.argmax = Eigen::VectorXd::Zero(space.dim());
    } else {
      out.argmax = R.triangularView<Eigen::Upper>().solve(h / out.value);
    }
    return out;
  }
  throw PreconditionError("support: dual norms of mixed polytopal/Euclidean norms are not supported");
}

double dual_norm(const PolytopalSpace& space, const Eigen::VectorXd& f) { return support(space, f).value; }

PolytopalSpace dual_space(const PolytopalSpace& space) {
  if (space.is_polytopal()) return PolytopalSpace(space.vertices(), "dual of " + space.label());
  if (space.is_ellipsoidal()) {
    Eigen::MatrixXd R = euclidean_factor(space.euclidean());
    Eigen::MatrixXd Rinv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(space.dim(), space.dim()));
    return PolytopalSpace::Ellipsoidal(Rinv.transpose(), "dual of " + space.label());
  }
  throw PreconditionError("dual_space: mixed polytopal/Euclidean norms are not supported");
}

AuerbachBasis auerbach_basis(const PolytopalSpace& space, std::uint64_t seed, int max_rounds) {
  const int n = space.dim();
  if (n > kMaxVertexDim) throw ResourceGuardError("auerbach_basis: requires dim <= 6");
  require(space.is_polytopal() || space.is_ellipsoidal(), "auerbach_basis: mixed norms are not supported");

  // Candidate pool on the unit sphere.
  std::vector<Eigen::VectorXd> pool;
  if (space.is_polytopal()) {
    const Eigen::MatrixXd& v = space.vertices();
    for (Eigen::Index r = 0; r < v.rows(); ++r) pool.emplace_back(v.row(r).transpose());
  }
  Rng rng(seed);
  for (int k = 0; k < 20 * n; ++k) {
    Eigen::VectorXd d = random_unit_vector(n, rng);
    pool.push_back(d / space.evaluate(d));
  }

  // Greedy max-volume start: repeatedly take the candidate farthest from the current span.
  Eigen::MatrixXd V(n, n);
  Eigen::MatrixXd orth(n, 0);
  for (int j = 0; j < n; ++j) {
    double best = -1.0;
    Eigen::Index best_k = 0;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      Eigen::VectorXd r = pool[k] - orth * (orth.transpose() * pool[k]);
      if (r.norm() > best) {
        best = r.norm();
        best_k = static_cast<Eigen::Index>(k);
      }
    }
    V.col(j) = pool[static_cast<std::size_t>(best_k)];
    Eigen::VectorXd r = V.col(j) - orth * (orth.transpose() * V.col(j));
    orth.conservativeResize(n, j + 1);
    orth.col(j) = r.normalized();
  }

  AuerbachBasis out;
  double det = std::abs(V.determinant());
  int round = 0;
  for (; round < max_rounds; ++round) {
    bool improved = false;
    for (int j = 0; j < n; ++j) {
      // det(V with column j replaced by w) = det(V) * (V^-1 w)_j.
      Eigen::VectorXd cofactor = V.determinant() * V.inverse().row(j).transpose();
      Support s = support(space, cofactor);
      if (s.value > det * (1.0 + 1e-13)) {
        V.col(j) = s.argmax;
        det = std::abs(V.determinant());
        improved = true;
      }
    }
    if (!improved) break;
  }
  out.rounds = round;
  out.basis = V;
  out.dual = V.inverse();
  out.determinant = det;
  double quality = 0.0;
  for (int j = 0; j < n; ++j) {
    quality = std::max(quality, space.evaluate(V.col(j)));
    quality = std::max(quality, dual_norm(space, out.dual.row(j).transpose()));
  }
  out.quality = quality;
  out.biorthogonality_residual = (out.dual * V - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  out.converged = quality <= 1.0 + tol::kAuerbachQuality && out.biorthogonality_residual <= tol::kBiorthogonality;
  return out;
}

Eigen::VectorXd random_ball_point(const PolytopalSpace& space, Rng& rng) {
  const int n = space.dim();
  Eigen::VectorXd d = random_unit_vector(n, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double radius = std::pow(unit(rng), 1.0 / n);
  return radius * d / space.evaluate(d);
}

BallNet ball_net(const PolytopalSpace& space, double xi, std::uint64_t seed) {
  require(xi > 0.0, "ball_net: xi must be positive");
  const int n = space.dim();
  BallNet net;
  net.space = space;
  net.xi = xi;
  net.cardinality_bound = std::pow(1.0 + 2.0 / xi, n);
  if (net.cardinality_bound > kMaxNetBound) throw ResourceGuardError("ball_net: (1+2/xi)^n exceeds 1e6");

  std::vector<Eigen::VectorXd> accepted;
  std::int64_t pool_size = 0;
  auto offer = [&](const Eigen::VectorXd& p) {
    ++pool_size;
    for (auto it = accepted.rbegin(); it != accepted.rend(); ++it) {
      if (space.evaluate(p - *it) < xi - tol::kNormArithmetic) return;
    }
    accepted.push_back(p);
  };

  offer(Eigen::VectorXd::Zero(n));
  if (space.is_polytopal() && vertex_enumeration_feasible(space.functionals().rows(), n)) {
    const Eigen::MatrixXd& v = space.vertices();
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      offer(v.row(r).transpose());
      offer(-v.row(r).transpose());
    }
  }

  const double step = xi / 4.0;
  std::vector<int> half_counts(static_cast<std::size_t>(n));
  double grid_size = 1.0;
  for (int j = 0; j < n; ++j) {
    const double extent = coordinate_extent(space, j);
    half_counts[static_cast<std::size_t>(j)] = static_cast<int>(std::ceil(extent / step - 1e-9));
    grid_size *= 2.0 * half_counts[static_cast<std::size_t>(j)] + 1.0;
  }
  if (grid_size <= static_cast<double>(kMaxGridPool)) {
    net.grid_pool = true;
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) idx[static_cast<std::size_t>(j)] = -half_counts[static_cast<std::size_t>(j)];
    Eigen::VectorXd p(n);
    while (true) {
      for (int j = 0; j < n; ++j) p(j) = idx[static_cast<std::size_t>(j)] * step;
      const double r = space.evaluate(p);
      if (r <= 1.0) {
        offer(p);
      } else {
        offer(p / r);
      }
      int j = n - 1;
      while (j >= 0 && idx[static_cast<std::size_t>(j)] == half_counts[static_cast<std::size_t>(j)]) {
        idx[static_cast<std::size_t>(j)] = -half_counts[static_cast<std::size_t>(j)];
        --j;
      }
      if (j < 0) break;
      ++idx[static_cast<std::size_t>(j)];
    }
  } else {
    net.grid_pool = false;
    Rng rng(seed);
    for (std::int64_t s = 0; s < kRandomPool; ++s) offer(random_ball_point(space, rng));
  }

  net.pool_size = pool_size;
  net.points.resize(static_cast<Eigen::Index>(accepted.size()), n);
  for (std::size_t k = 0; k < accepted.size(); ++k) net.points.row(static_cast<Eigen::Index>(k)) = accepted[k].transpose();
  if (static_cast<double>(net.size()) > net.cardinality_bound * (1.0 + 1e-12)) {
    throw ConstructionError("ball_net: cardinality exceeds (1+2/xi)^n");
  }
  return net;
}

std::pair<Eigen::Index, double> nearest_net_point(const BallNet& net, const Eigen::VectorXd& a) {
  Eigen::Index best = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < net.size(); ++r) {
    const double d = net.space.evaluate(a - net.points.row(r).transpose());
    if (d < dist) {
      dist = d;
      best = r;
    }
  }
  return {best, dist};
}

double sampled_covering_radius(const BallNet& net, int samples, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    worst = std::max(worst, nearest_net_point(net, random_ball_point(net.space, rng)).second);
  }
  return worst;
}

double grid_covering_radius(const BallNet& net, double step) {
  const int n = net.space.dim();
  require(n <= 2, "grid_covering_radius: dim <= 2 only");
  require(step > 0, "grid_covering_radius: step must be positive");
  std::vector<int> half(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    half[static_cast<std::size_t>(j)] = static_cast<int>(std::ceil(coordinate_extent(net.space, j) / step - 1e-9));
  }
  double worst = 0.0;
  Eigen::VectorXd p(n);
  const int h0 = half[0];
  const int h1 = n == 2 ? half[1] : 0;
  for (int i = -h0; i <= h0; ++i) {
    for (int k = -h1; k <= h1; ++k) {
      p(0) = i * step;
      if (n == 2) p(1) = k * step;
      const double r = net.space.evaluate(p);
      if (r > 1.0) p /= r;
      worst = std::max(worst, nearest_net_point(net, p).second);
    }
  }
  return worst;
}

SubspaceNet subspace_net(int n, const PolytopalSpace& X, double xi, std::uint64_t seed) {
  const int m = X.dim();
  require(n >= 1 && n <= m, "subspace_net: need 1 <= n <= dim X");
  require(xi > 0.0 && xi * n < 1.0, "subspace_net: need 0 < xi < 1/n");
  SubspaceNet out;
  out.n = n;
  out.ball = ball_net(X, xi, seed);
  out.radius = (1.0 + xi * n) / (1.0 - xi * n);
  const double size = static_cast<double>(out.ball.size());
  out.tuple_count = std::pow(size, n);
  out.cardinality_bound = std::pow(1.0 + 2.0 / xi, static_cast<double>(n) * m);
  if (out.tuple_count > 1e7) return out;

  out.enumerated = out.tuple_count <= 1e5;
  out.degenerate = 0;
  std::vector<int> tuple(static_cast<std::size_t>(n), 0);
  Eigen::MatrixXd F(m, n);
  const int net_size = static_cast<int>(out.ball.size());
  while (true) {
    for (int j = 0; j < n; ++j) F.col(j) = out.ball.points.row(tuple[static_cast<std::size_t>(j)]).transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(F);
    lu.setThreshold(1e-10);
    if (lu.rank() < n) {
      ++out.degenerate;
    } else if (out.enumerated) {
      out.tuples.push_back(tuple);
      out.spaces.push_back(restrict_to(X, F, "E_f"));
    }
    int j = n - 1;
    while (j >= 0 && tuple[static_cast<std::size_t>(j)] == net_size - 1) {
      tuple[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
    ++tuple[static_cast<std::size_t>(j)];
  }
  return out;
}

PolytopalSpace subspace_net_member(const SubspaceNet& net, const std::vector<int>& tuple) {
  require(static_cast<int>(tuple.size()) == net.n, "subspace_net_member: tuple length must be n");
  Eigen::MatrixXd F(net.ball.space.dim(), net.n);
  for (int j = 0; j < net.n; ++j) {
    const int idx = tuple[static_cast<std::size_t>(j)];
    require(idx >= 0 && idx < net.ball.size(), "subspace_net_member: index outside the net");
    F.col(j) = net.ball.points.row(idx).transpose();
  }
  return restrict_to(net.ball.space, F, "E_f");
}

SubspaceNetCheck verify_subspace_net(const SubspaceNet& net, const Eigen::MatrixXd& basis, int samples,
                                     std::uint64_t seed) {
  const PolytopalSpace& X = net.ball.space;
  require(basis.rows() == X.dim() && basis.cols() == net.n, "verify_subspace_net: basis must be dim X by n");
  PolytopalSpace coords = restrict_to(X, basis, "E");
  AuerbachBasis ab = auerbach_basis(coords, seed);
  if (!ab.converged) throw ConstructionError("verify_subspace_net: Auerbach search did not converge");
  Eigen::MatrixXd E = basis * ab.basis;

  SubspaceNetCheck out;
  Eigen::MatrixXd F(X.dim(), net.n);
  for (int j = 0; j < net.n; ++j) {
    auto [idx, dist] = nearest_net_point(net.ball, E.col(j));
    out.tuple.push_back(static_cast<int>(idx));
    out.snap_distance = std::max(out.snap_distance, dist);
    F.col(j) = net.ball.points.row(idx).transpose();
  }
  out.lower_factor = 1.0 - out.snap_distance * net.n;
  out.upper_factor = 1.0 + out.snap_distance * net.n;

  Rng rng(stream_seed(seed, 1));
  out.ratio_min = std::numeric_limits<double>::infinity();
  out.ratio_max = 0.0;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd x = gaussian_vector(net.n, rng);
    const double ratio = X.evaluate(F * x) / X.evaluate(E * x);
    out.ratio_min = std::min(out.ratio_min, ratio);
    out.ratio_max = std::max(out.ratio_max, ratio);
  }
  out.samples = samples;
  const double slack = 1e-9;
  out.within_factors = out.ratio_min >= out.lower_factor - slack && out.ratio_max <= out.upper_factor + slack;
  out.observed_distance = out.ratio_max / out.ratio_min;
  out.within_radius = out.snap_distance <= net.ball.xi + slack && out.observed_distance <= net.radius + slack;
  return out;
}

LinfEmbedding embed_linf(const PolytopalSpace& E, double delta, std::uint64_t seed) {
  require(delta > 0.0 && delta < 1.0, "embed_linf: delta must lie in (0,1)");
  const int n = E.dim();
  if (std::pow(1.0 + 2.0 / delta, n) > kMaxNetBound) throw ResourceGuardError("embed_linf: (1+2/delta)^n exceeds 1e6");
  LinfEmbedding out;
  out.delta = delta;
  out.dual_net = ball_net(dual_space(E), delta, seed);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index r = 0; r < out.dual_net.size(); ++r) {
    if (out.dual_net.points.row(r).cwiseAbs().maxCoeff() > 0.0) keep.push_back(r);
  }
  out.functionals.resize(static_cast<Eigen::Index>(keep.size()), n);
  for (std::size_t k = 0; k < keep.size(); ++k) out.functionals.row(static_cast<Eigen::Index>(k)) = out.dual_net.points.row(keep[k]);
  out.m = static_cast<int>(keep.size());
  out.m_bound = std::floor(std::pow(1.0 + 2.0 / delta, n) + 1e-9);
  out.distortion_bound = 1.0 / (1.0 - delta);
  out.image = PolytopalSpace(out.functionals, "l_inf embedding of " + E.label());
  return out;
}

DistortionSample sample_distortion(const PolytopalSpace& E, const PolytopalSpace& F, int samples,
                                   std::uint64_t seed) {
  require(E.dim() == F.dim(), "sample_distortion: dimension mismatch");
  Rng rng(seed);
  DistortionSample out;
  out.samples = samples;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd x = gaussian_vector(E.dim(), rng);
    const double e = E.evaluate(x);
    const double f = F.evaluate(x);
    out.forward = std::max(out.forward, f / e);
    out.backward = std::max(out.backward, e / f);
  }
  out.distortion = out.forward * out.backward;
  return out;
}

std::vector<BiorthogonalPair> sign_system(const SignSet& T) {
  std::vector<BiorthogonalPair> out;
  const double scale = 1.0 / std::sqrt(static_cast<double>(T.n));
  for (Eigen::Index r = 0; r < T.size(); ++r) {
    Eigen::VectorXd t = T.vectors.row(r).transpose().cast<double>() * scale;
    out.push_back({t, t});
  }
  return out;
}

void validate_system(const PolytopalSpace& E, const std::vector<BiorthogonalPair>& system, double theta,
                     double C) {
  const double slack = 1e-9;
  for (std::size_t t = 0; t < system.size(); ++t) {
    const auto& [x, f] = system[t];
    require(x.size() == E.dim() && f.size() == E.dim(), "lemloc system: dimension mismatch");
    std::ostringstream where;
    where << " (member " << t << ")";
    if (E.evaluate(x) > C * (1.0 + slack)) throw PreconditionError("lemloc system: ||x_t||_E <= C violated" + where.str());
    if (dual_norm(E, f) > C * (1.0 + slack)) {
      throw PreconditionError("lemloc system: ||x_t*||_E* <= C violated" + where.str());
    }
    if (std::abs(f.dot(x) - 1.0) > slack) throw PreconditionError("lemloc system: x_t*(x_t) = 1 violated" + where.str());
  }
  for (std::size_t s = 0; s < system.size(); ++s) {
    for (std::size_t t = 0; t < system.size(); ++t) {
      if (s == t) continue;
      if (std::abs(system[s].functional.dot(system[t].vector)) > theta + slack) {
        std::ostringstream msg;
        msg << "lemloc system: |x_s*(x_t)| <= theta violated (s=" << s << ", t=" << t << ")";
        throw PreconditionError(msg.str());
      }
    }
  }
}

LocalSpace make_lemloc_space(const PolytopalSpace& E, const std::vector<BiorthogonalPair>& system, double theta,
                             double C, const std::vector<int>& x) {
  require(theta > 0.0 && theta < 1.0, "make_lemloc_space: theta must lie in (0,1)");
  require(C >= 1.0, "make_lemloc_space: C must be >= 1");
  validate_system(E, system, theta, C);
  std::set<int> seen;
  for (int idx : x) {
    require(idx >= 0 && idx < static_cast<int>(system.size()), "make_lemloc_space: index outside the system");
    require(seen.insert(idx).second, "make_lemloc_space: repeated index");
  }
  const double scale = theta / C;
  Eigen::MatrixXd phi(E.functionals().rows() + static_cast<Eigen::Index>(x.size()), E.dim());
  phi.topRows(E.functionals().rows()) = scale * E.functionals();
  for (std::size_t k = 0; k < x.size(); ++k) {
    phi.row(E.functionals().rows() + static_cast<Eigen::Index>(k)) =
        system[static_cast<std::size_t>(x[k])].functional.transpose();
  }
  LocalSpace out{PolytopalSpace(std::move(phi), scale * E.euclidean(), "E_x (local)"), C * C / theta, scale, C};
  return out;
}

}  // namespace bmlab
