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

#include "bmlab/bmdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "bmlab/common.hpp"
#include "bmlab/rng.hpp"

namespace bmlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

Eigen::MatrixXd upper_factor(const Eigen::MatrixXd& L) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(L);
  return qr.matrixQR().topRows(L.cols()).triangularView<Eigen::Upper>();
}

Eigen::MatrixXd rotation(double angle) {
  Eigen::MatrixXd r(2, 2);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  r << c, -s, s, c;
  return r;
}

// Compass plus random-direction pattern search on the entries of u.
struct PatternSearch {
  std::function<double(const Eigen::MatrixXd&)> objective;
  int max_evaluations = 4000;
  double min_step = 1e-7;

  std::pair<Eigen::MatrixXd, double> run(Eigen::MatrixXd u, double fu, Rng& rng, int& evaluations) const {
    const Eigen::Index n = u.rows();
    double step = 0.25;
    int used = 0;
    while (step > min_step && used < max_evaluations) {
      bool improved = false;
      for (Eigen::Index i = 0; i < n && used < max_evaluations; ++i) {
        for (Eigen::Index j = 0; j < n && used < max_evaluations; ++j) {
          for (double sign : {1.0, -1.0}) {
            Eigen::MatrixXd trial = u;
            trial(i, j) += sign * step;
            const double ft = objective(trial);
            ++used;
            if (ft < fu - 1e-15) {
              u = trial;
              fu = ft;
              improved = true;
              break;
            }
          }
        }
      }
      for (int k = 0; k < 2 && used < max_evaluations; ++k) {
        Eigen::VectorXd d = random_unit_vector(n * n, rng);
        Eigen::MatrixXd dm = Eigen::Map<Eigen::MatrixXd>(d.data(), n, n);
        for (double sign : {1.0, -1.0}) {
          Eigen::MatrixXd trial = u + sign * step * dm;
          const double ft = objective(trial);
          ++used;
          if (ft < fu - 1e-15) {
            u = trial;
            fu = ft;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
      // Keep the scale fixed; the objective is scale invariant.
      const double fro = u.norm();
      if (fro > 0) u *= std::sqrt(static_cast<double>(n)) / fro;
    }
    evaluations += used;
    return {u, fu};
  }
};

}  // namespace

double op_norm_from_l1(const Eigen::MatrixXd& u, const PolytopalSpace& F) {
  require(u.rows() == F.dim(), "op_norm_from_l1: u has the wrong number of rows");
  double best = 0.0;
  for (Eigen::Index j = 0; j < u.cols(); ++j) best = std::max(best, F.evaluate(u.col(j)));
  return best;
}

std::pair<double, double> op_norm_sandwich(const Eigen::MatrixXd& u, const PolytopalSpace& source,
                                           const PolytopalSpace& F) {
  require(u.cols() == source.dim(), "op_norm_sandwich: u has the wrong number of columns");
  require(satisfies_unit_sandwich(source), "op_norm_sandwich: source does not satisfy sup|a_j| <= ||a|| <= sum|a_j|");
  const double lower = op_norm_from_l1(u, F);
  return {lower, source.dim() * lower};
}

double operator_norm(const Eigen::MatrixXd& u, const PolytopalSpace& E, const PolytopalSpace& F) {
  require(u.cols() == E.dim() && u.rows() == F.dim(), "operator_norm: dimension mismatch");
  if (vertices_available(E)) {
    const Eigen::MatrixXd& v = E.vertices();
    double best = 0.0;
    for (Eigen::Index r = 0; r < v.rows(); ++r) best = std::max(best, F.evaluate(u * v.row(r).transpose()));
    return best;
  }
  if (E.is_ellipsoidal()) {
    Eigen::MatrixXd R = upper_factor(E.euclidean());
    // W = u R^-1.
    Eigen::MatrixXd W = R.transpose().triangularView<Eigen::Lower>().solve(u.transpose()).transpose();
    double best = 0.0;
    if (F.has_functionals()) best = (F.functionals() * W).rowwise().norm().maxCoeff();
    if (F.has_euclidean()) best = std::max(best, spectral_norm(F.euclidean() * W));
    return best;
  }
  if (E.is_polytopal() && F.is_polytopal()) {
    double best = 0.0;
    const Eigen::MatrixXd g = (F.functionals() * u).transpose();
    for (Eigen::Index i = 0; i < g.cols(); ++i) best = std::max(best, support(E, g.col(i)).value);
    return best;
  }
  throw PreconditionError("operator_norm: no exact route for this pair (mixed norms need a vertex-enumerable source)");
}

double map_distortion(const Eigen::MatrixXd& u, const PolytopalSpace& E, const PolytopalSpace& F) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(u);
  if (!lu.isInvertible()) return kInf;
  const Eigen::MatrixXd inv = lu.inverse();
  const double value = operator_norm(u, E, F) * operator_norm(inv, F, E);
  if (!std::isfinite(value)) return kInf;
  if (value < 1.0 - 1e-9) {
    std::ostringstream msg;
    msg << "map_distortion: ||u|| ||u^-1|| = " << value << " < 1";
    throw ConstructionError(msg.str());
  }
  return value;
}

LinearMapBetween make_map(const Eigen::MatrixXd& u, const PolytopalSpace& source, const PolytopalSpace& target) {
  LinearMapBetween out;
  out.matrix = u;
  out.source = source;
  out.target = target;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(u);
  if (lu.isInvertible()) {
    out.inverse = lu.inverse();
    out.inverse_residual = (u * out.inverse - Eigen::MatrixXd::Identity(u.rows(), u.rows())).cwiseAbs().maxCoeff();
    if (out.inverse_residual > 1e-10) throw ConstructionError("make_map: inverse residual above 1e-10");
  }
  out.op_norm_lower = out.op_norm_upper = operator_norm(u, source, target);
  return out;
}

std::string to_string(Certificate::Kind kind) {
  return kind == Certificate::Kind::IdentityWitness ? "identity-witness" : "map-witness";
}

Certificate identity_certificate(const std::vector<int>& x, const std::vector<int>& y, const SignSet& T) {
  require(x.size() == y.size(), "identity_certificate: x and y must have equal cardinality");
  require(x != y, "identity_certificate: x and y must differ");
  require(T.theta * T.n >= 1.0, "identity_certificate: need theta n >= 1");
  std::set<int> ys(y.begin(), y.end());
  int s = -1;
  for (int idx : std::set<int>(x.begin(), x.end())) {
    if (!ys.count(idx)) {
      s = idx;
      break;
    }
  }
  if (s < 0) throw ConstructionError("identity_certificate: x is contained in y");
  PolytopalSpace Ex = make_Ex(T, x);
  PolytopalSpace Ey = make_Ex(T, y);
  Certificate out;
  out.kind = Certificate::Kind::IdentityWitness;
  out.witness = T.vectors.row(s).transpose().cast<double>();
  out.source_norm = Ex.evaluate(out.witness);
  out.target_norm = Ey.evaluate(out.witness);
  if (out.source_norm != static_cast<double>(T.n)) throw ConstructionError("identity_certificate: ||s||_{E_x} != n");
  if (out.target_norm > T.correlation_limit()) throw ConstructionError("identity_certificate: ||s||_{E_y} > theta n");
  out.implied_ratio = out.source_norm / out.target_norm;
  return out;
}

Certificate best_identity_witness(const PolytopalSpace& big, const PolytopalSpace& small,
                                  const Eigen::MatrixXd& candidates) {
  require(candidates.cols() == big.dim() && big.dim() == small.dim(), "best_identity_witness: dimension mismatch");
  Certificate out;
  out.kind = Certificate::Kind::IdentityWitness;
  for (Eigen::Index r = 0; r < candidates.rows(); ++r) {
    Eigen::VectorXd w = candidates.row(r).transpose();
    const double s = big.evaluate(w);
    const double t = small.evaluate(w);
    if (t <= 0.0) continue;
    if (s / t > out.implied_ratio) {
      out.witness = w;
      out.source_norm = s;
      out.target_norm = t;
      out.implied_ratio = s / t;
    }
  }
  if (out.witness.size() == 0) throw ConstructionError("best_identity_witness: no usable candidate");
  return out;
}

Certificate map_witness(const Eigen::MatrixXd& u, const PolytopalSpace& E, const PolytopalSpace& F,
                        const Eigen::VectorXd& w) {
  require(u.cols() == E.dim() && u.rows() == F.dim() && w.size() == E.dim(), "map_witness: dimension mismatch");
  Certificate out;
  out.kind = Certificate::Kind::MapWitness;
  out.map = u;
  out.witness = w;
  out.source_norm = E.evaluate(w);
  out.target_norm = F.evaluate(u * w);
  require(out.source_norm > 0.0, "map_witness: zero witness");
  out.implied_ratio = out.target_norm / out.source_norm;
  return out;
}

bool recheck_certificate(const Certificate& c, const PolytopalSpace& source, const PolytopalSpace& target,
                         double tolerance) {
  if (c.witness.size() != source.dim()) return false;
  double s = source.evaluate(c.witness);
  double t = 0.0;
  double ratio = 0.0;
  if (c.kind == Certificate::Kind::IdentityWitness) {
    if (c.witness.size() != target.dim()) return false;
    t = target.evaluate(c.witness);
    ratio = s / t;
  } else {
    if (c.map.rows() != target.dim() || c.map.cols() != source.dim()) return false;
    t = target.evaluate(c.map * c.witness);
    ratio = t / s;
  }
  auto close = [tolerance](double a, double b) { return std::abs(a - b) <= tolerance * std::max(1.0, std::abs(b)); };
  return close(s, c.source_norm) && close(t, c.target_norm) && close(ratio, c.implied_ratio);
}

JohnEllipsoid john_ellipsoid(const PolytopalSpace& space, int max_iterations) {
  const int n = space.dim();
  JohnEllipsoid out;
  if (space.is_ellipsoidal()) {
    out.shape = upper_factor(space.euclidean());
    out.inner_radius_factor = 1.0;
    out.outer_radius_factor = 1.0;
    return out;
  }
  require(space.is_polytopal(), "john_ellipsoid: mixed norms are not supported");
  if (!vertices_available(space)) throw ResourceGuardError("john_ellipsoid: vertex enumeration guard (dim <= 6)");

  const Eigen::MatrixXd& P = space.functionals();
  const Eigen::Index m = P.rows();
  Eigen::VectorXd u = Eigen::VectorXd::Constant(m, 1.0 / m);
  Eigen::MatrixXd X(n, n);
  Eigen::VectorXd kappa(m);
  auto refresh = [&] {
    X = P.transpose() * u.asDiagonal() * P;
    Eigen::LLT<Eigen::MatrixXd> llt(X);
    Eigen::MatrixXd Y = llt.solve(P.transpose());
    kappa = (P.transpose().cwiseProduct(Y)).colwise().sum().transpose();
  };
  const double gap_tol = 1e-8;
  int it = 0;
  for (; it < max_iterations; ++it) {
    refresh();
    Eigen::Index j = 0;
    const double kmax = kappa.maxCoeff(&j);
    out.duality_gap = kmax / n - 1.0;
    if (out.duality_gap <= gap_tol) break;
    Eigen::Index k = -1;
    double kmin = kInf;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (u(i) > 0 && kappa(i) < kmin) {
        kmin = kappa(i);
        k = i;
      }
    }
    if (kmax - n >= n - kmin || k < 0) {
      const double beta = (kmax - n) / (n * (kmax - 1.0));
      u *= 1.0 - beta;
      u(j) += beta;
    } else {
      double beta = u(k) / (1.0 - u(k));
      if (kmin > 1.0) beta = std::min(beta, (n - kmin) / (n * (kmin - 1.0)));
      u *= 1.0 + beta;
      u(k) -= beta;
      if (u(k) < 1e-300) u(k) = 0.0;
    }
  }
  if (out.duality_gap > gap_tol) throw ConstructionError("john_ellipsoid: no convergence within the iteration budget");
  out.iterations = it;
  const double kmax = kappa.maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kmax * X);
  out.shape = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
  Eigen::MatrixXd inv_shape =
      eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  out.inner_radius_factor = (P * inv_shape).rowwise().norm().maxCoeff();
  const Eigen::MatrixXd& v = space.vertices();
  out.outer_radius_factor = (v * out.shape).rowwise().norm().maxCoeff();
  return out;
}

double witness_lower_bound(const Eigen::MatrixXd& u, const PolytopalSpace& E, const PolytopalSpace& F,
                           double stop_at) {
  const int n = E.dim();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(u);
  if (!lu.isInvertible()) return kInf;
  const Eigen::MatrixXd inv = lu.inverse();
  Eigen::MatrixXd tests(n + E.functionals().rows() + F.functionals().rows(), n);
  tests << Eigen::MatrixXd::Identity(n, n), E.functionals(), F.functionals();
  double forward = 0.0;
  double backward = 0.0;
  for (Eigen::Index r = 0; r < tests.rows(); ++r) {
    Eigen::VectorXd a = tests.row(r).transpose();
    const double ea = E.evaluate(a);
    const double fa = F.evaluate(a);
    if (ea > 0) forward = std::max(forward, F.evaluate(u * a) / ea);
    if (fa > 0) backward = std::max(backward, E.evaluate(inv * a) / fa);
    if (stop_at > 0 && forward * backward >= stop_at) break;
  }
  return forward * backward;
}

UpperBound bm_upper(const PolytopalSpace& E, const PolytopalSpace& F, const UpperBoundOptions& options) {
  require(E.dim() == F.dim(), "bm_upper: dimensions differ");
  require(options.effort >= 0, "bm_upper: effort must be nonnegative");
  const int n = E.dim();
  UpperBound out;
  out.value = kInf;
  out.john_bound = kInf;
  auto objective = [&](const Eigen::MatrixXd& u) {
    ++out.evaluations;
    return map_distortion(u, E, F);
  };
  auto offer = [&](const Eigen::MatrixXd& u, const std::string& route) {
    if (options.skip_at_least > 0 && witness_lower_bound(u, E, F, options.skip_at_least) >= options.skip_at_least) {
      return;
    }
    const double value = objective(u);
    if (value < out.value) {
      out.value = value;
      out.map = u;
      out.route = route;
    }
  };
  auto done = [&] { return options.stop_below > 0 && out.value < options.stop_below; };

  try {
    JohnEllipsoid je = john_ellipsoid(E);
    JohnEllipsoid jf = john_ellipsoid(F);
    out.john_bound = (je.outer_radius_factor / je.inner_radius_factor) * (jf.outer_radius_factor / jf.inner_radius_factor);
    offer(jf.shape.inverse() * je.shape, "john");
  } catch (const PreconditionError&) {
    // No ellipsoid for this pair; the other routes still apply.
  }
  if (done()) return out;
  offer(Eigen::MatrixXd::Identity(n, n), "identity");
  if (done()) return out;
  if (n <= 4) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      for (int signs = 0; signs < (1 << n); ++signs) {
        Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
        for (int j = 0; j < n; ++j) p(perm[static_cast<std::size_t>(j)], j) = (signs >> j) & 1 ? -1.0 : 1.0;
        offer(p, "signed-permutation");
        if (done()) return out;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  PatternSearch search;
  search.objective = [&](const Eigen::MatrixXd& u) { return map_distortion(u, E, F); };
  search.max_evaluations = 200 * n * n;
  for (int restart = 0; restart < options.effort; ++restart) {
    Rng rng(stream_seed(options.seed, static_cast<std::uint64_t>(restart)));
    Eigen::MatrixXd start;
    if (restart == 0 && std::isfinite(out.value)) {
      start = out.map;
    } else {
      Eigen::VectorXd g = gaussian_vector(n * n, rng);
      start = Eigen::Map<Eigen::MatrixXd>(g.data(), n, n);
    }
    double fs = map_distortion(start, E, F);
    if (!std::isfinite(fs)) continue;  // singular start
    auto [u, fu] = search.run(start, fs, rng, out.evaluations);
    ++out.restarts;
    if (fu < out.value) {
      out.value = fu;
      out.map = u;
      out.route = "pattern-search";
    }
    if (done()) break;
  }
  return out;
}

namespace {

struct Cell {
  double lo[3];
  double hi[3];
  int sign;
  double lower;
  double forward;
  double backward;
};

struct CellOrder {
  bool operator()(const Cell& a, const Cell& b) const { return a.lower > b.lower; }
};

}  // namespace

Exact2dResult bm_exact_2d(const PolytopalSpace& E, const PolytopalSpace& F, double tol, std::int64_t max_cells) {
  require(E.dim() == 2 && F.dim() == 2, "bm_exact_2d: both spaces must be 2-dimensional");
  require(E.is_polytopal() || E.is_ellipsoidal(), "bm_exact_2d: mixed norms are not supported");
  require(F.is_polytopal() || F.is_ellipsoidal(), "bm_exact_2d: mixed norms are not supported");
  require(tol > 0.0, "bm_exact_2d: tol must be positive");

  JohnEllipsoid je = john_ellipsoid(E);
  JohnEllipsoid jf = john_ellipsoid(F);
  // Normalized copies: unit disc inside the ball, ball inside c times the disc.
  const Eigen::MatrixXd ae_inv = je.shape.inverse();
  const Eigen::MatrixXd af_inv = jf.shape.inverse();
  PolytopalSpace En = restrict_to(E, ae_inv, "E'");
  PolytopalSpace Fn = restrict_to(F, af_inv, "F'");
  const double cE = je.outer_radius_factor;
  const double cF = jf.outer_radius_factor;

  Exact2dResult out;
  out.tolerance = tol;
  out.c_source = cE;
  out.c_target = cF;
  out.sigma_min = std::min(1.0, 1.0 / (cE * cE * cF * cF));
  auto to_original = [&](const Eigen::MatrixXd& u) -> Eigen::MatrixXd { return af_inv * u * je.shape; };

  if (E.is_ellipsoidal() && F.is_ellipsoidal()) {
    out.value = out.lower = 1.0;
    out.certified = true;
    out.map = to_original(Eigen::MatrixXd::Identity(2, 2));
    return out;
  }

  const bool phi_free = !F.is_ellipsoidal();
  const bool psi_free = !E.is_ellipsoidal();
  const bool sign_free = phi_free && psi_free;
  const double pi = std::acos(-1.0);

  auto build = [](double phi, double psi, double sigma, int sign) -> Eigen::MatrixXd {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = sign * sigma;
    return rotation(phi) * d * rotation(psi);
  };

  double upper = kInf;
  Eigen::MatrixXd best_u = Eigen::MatrixXd::Identity(2, 2);
  std::priority_queue<Cell, std::vector<Cell>, CellOrder> queue;
  double pruned_min = kInf;

  auto evaluate = [&](Cell& c) {
    const double phi = 0.5 * (c.lo[0] + c.hi[0]);
    const double psi = 0.5 * (c.lo[1] + c.hi[1]);
    const double sigma = 0.5 * (c.lo[2] + c.hi[2]);
    Eigen::MatrixXd u = build(phi, psi, sigma, c.sign);
    Eigen::MatrixXd inv = build(-psi, -phi, 1.0 / sigma, c.sign);
    c.forward = operator_norm(u, En, Fn);
    c.backward = operator_norm(inv, Fn, En);
    const double f = c.forward * c.backward;
    if (f < upper) {
      upper = f;
      best_u = u;
    }
    const double h_phi = 0.5 * (c.hi[0] - c.lo[0]);
    const double h_psi = 0.5 * (c.hi[1] - c.lo[1]);
    const double h_sig = 0.5 * (c.hi[2] - c.lo[2]);
    const double s_lo = c.lo[2];
    const double d1 = h_phi + h_psi + h_sig;
    const double d2 = (h_phi + h_psi) / s_lo + h_sig / (s_lo * s_lo);
    const double a = c.forward - cE * d1;
    const double b = c.backward - cF * d2;
    double lb = (a > 0 && b > 0) ? a * b : 1.0;
    lb = std::max(lb, 1.0 / (c.hi[2] * cE * cF));
    c.lower = std::max(lb, 1.0);
    ++out.cells;
  };

  auto push = [&](Cell c) {
    evaluate(c);
    if (c.lower >= upper - tol) {
      pruned_min = std::min(pruned_min, c.lower);
    } else {
      queue.push(c);
    }
  };

  const int grid_angle = 8;
  const int grid_sigma = 4;
  const int phi_pieces = phi_free ? grid_angle : 1;
  const int psi_pieces = psi_free ? grid_angle : 1;
  const double phi_span = phi_free ? pi : 0.0;
  const double psi_span = psi_free ? pi : 0.0;
  std::vector<Cell> initial;
  for (int sign : {1, -1}) {
    if (sign < 0 && !sign_free) continue;
    for (int i = 0; i < phi_pieces; ++i) {
      for (int j = 0; j < psi_pieces; ++j) {
        for (int k = 0; k < grid_sigma; ++k) {
          Cell c{};
          c.sign = sign;
          c.lo[0] = phi_span * i / phi_pieces;
          c.hi[0] = phi_span * (i + 1) / phi_pieces;
          c.lo[1] = psi_span * j / psi_pieces;
          c.hi[1] = psi_span * (j + 1) / psi_pieces;
          c.lo[2] = out.sigma_min + (1.0 - out.sigma_min) * k / grid_sigma;
          c.hi[2] = out.sigma_min + (1.0 - out.sigma_min) * (k + 1) / grid_sigma;
          initial.push_back(c);
        }
      }
    }
  }
  for (auto& c : initial) evaluate(c);
  for (auto& c : initial) {
    if (c.lower >= upper - tol) {
      pruned_min = std::min(pruned_min, c.lower);
    } else {
      queue.push(c);
    }
  }

  double lower = 1.0;
  while (true) {
    if (queue.empty()) {
      lower = std::min(pruned_min, upper);
      break;
    }
    Cell top = queue.top();
    if (top.lower >= upper - tol) {
      lower = std::min({top.lower, pruned_min, upper});
      break;
    }
    if (out.cells >= max_cells) {
      lower = std::min(top.lower, pruned_min);
      break;
    }
    queue.pop();
    // Split the coordinate contributing most to the Lipschitz slack.
    const double s_lo = top.lo[2];
    const double w_phi = phi_free ? (top.hi[0] - top.lo[0]) * (cE * top.backward + cF * top.forward / s_lo) : 0.0;
    const double w_psi = psi_free ? (top.hi[1] - top.lo[1]) * (cE * top.backward + cF * top.forward / s_lo) : 0.0;
    const double w_sig = (top.hi[2] - top.lo[2]) * (cE * top.backward + cF * top.forward / (s_lo * s_lo));
    int axis = 2;
    if (w_phi >= w_psi && w_phi >= w_sig) axis = 0;
    else if (w_psi >= w_sig) axis = 1;
    const double mid = 0.5 * (top.lo[axis] + top.hi[axis]);
    Cell left = top;
    Cell right = top;
    left.hi[axis] = mid;
    right.lo[axis] = mid;
    push(left);
    push(right);
  }

  out.value = upper;
  out.lower = std::max(1.0, std::min(lower, upper));
  out.certified = out.value - out.lower <= tol;

  // Local polish of the incumbent in matrix coordinates.
  PatternSearch search;
  search.objective = [&](const Eigen::MatrixXd& u) { return map_distortion(u, En, Fn); };
  search.max_evaluations = 2000;
  Rng rng(0x5eed);
  int evals = 0;
  auto [u, fu] = search.run(best_u, upper, rng, evals);
  if (fu < out.value) {
    out.value = fu;
    best_u = u;
  }
  out.map = to_original(best_u);
  return out;
}

PackingResult greedy_packing(const std::vector<PolytopalSpace>& family, double r, int effort, std::uint64_t seed,
                             IdentityCertifier certifier) {
  require(r > 1.0, "greedy_packing: r must exceed 1");
  PackingResult out;
  out.r = r;
  out.effort = effort;
  for (int i = 0; i < static_cast<int>(family.size()); ++i) {
    bool close = false;
    for (int a : out.accepted) {
      UpperBoundOptions opts;
      opts.effort = effort;
      opts.seed = derive_seed(seed, "bmdist", "greedy_packing", static_cast<std::uint64_t>(i) * 1000003ULL + a);
      opts.stop_below = r;
      opts.skip_at_least = r;
      UpperBound ub = bm_upper(family[static_cast<std::size_t>(a)], family[static_cast<std::size_t>(i)], opts);
      if (ub.value < r) {
        out.rejected.push_back({i, a, ub.value});
        close = true;
        break;
      }
    }
    if (!close) out.accepted.push_back(i);
  }
  if (!certifier) {
    certifier = [&family](int i, int j) {
      const auto& big = family[static_cast<std::size_t>(i)];
      return best_identity_witness(big, family[static_cast<std::size_t>(j)], big.functionals());
    };
  }
  for (std::size_t p = 0; p < out.accepted.size(); ++p) {
    for (std::size_t q = p + 1; q < out.accepted.size(); ++q) {
      const int i = out.accepted[p];
      const int j = out.accepted[q];
      out.pairs.push_back({i, j, certifier(i, j)});
    }
  }
  return out;
}

PackingResult greedy_packing_Ex(const SignSet& T, const std::vector<std::vector<int>>& members, double r, int effort,
                                std::uint64_t seed) {
  std::vector<PolytopalSpace> family;
  family.reserve(members.size());
  for (const auto& x : members) family.push_back(make_Ex(T, x));
  return greedy_packing(family, r, effort, seed, [&](int i, int j) {
    return identity_certificate(members[static_cast<std::size_t>(i)], members[static_cast<std::size_t>(j)], T);
  });
}

ClaimCount claim_counter(int n, double r, double theta) {
  require(n >= 1, "claim_counter: n must be positive");
  require(theta > 0.0 && theta < 1.0, "claim_counter: theta must lie in (0,1)");
  require(r >= 1.0, "claim_counter: r must be at least 1");
  require(r * theta < 1.0, "claim_counter: need r theta < 1 (1 + eta = 1/(r theta) must exceed 1)");
  ClaimCount out;
  out.eta = 1.0 / (r * theta) - 1.0;
  out.bound = LogLevelNumber::FromLog(static_cast<double>(n) * n * std::log1p(4.0 * n / out.eta));
  return out;
}

}  // namespace bmlab
