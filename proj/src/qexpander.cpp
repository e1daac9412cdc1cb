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

#include "bmlab/qexpander.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace bmlab {

namespace {

using Vec = VectorXc;

constexpr int kMaxDenseKron = 32;
constexpr Eigen::Index kMaxEigenKron = 64;

void check_tuple(const UnitaryTuple& u) {
  require(u.n >= 1 && u.N >= 1, "unitary tuple: n and N must be positive");
  require(static_cast<int>(u.matrices.size()) == u.n, "unitary tuple: member count differs from n");
  for (const auto& m : u.matrices) require(m.rows() == u.N && m.cols() == u.N, "unitary tuple: member is not N x N");
}

MatrixXc kron(const MatrixXc& a, const MatrixXc& b) {
  MatrixXc out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Traceless part of a column-major vectorized N x N matrix.
void project_traceless(Vec& v, int N) {
  Complex tr = 0.0;
  for (int i = 0; i < N; ++i) tr += v(i * N + i);
  tr /= static_cast<double>(N);
  for (int i = 0; i < N; ++i) v(i * N + i) -= tr;
}

}  // namespace

double spectral_norm_power(const MatrixXc& a, std::uint64_t seed) {
  if (a.size() == 0) return 0.0;
  PowerIterationOptions opts;
  opts.seed = seed;
  std::function<Vec(const Vec&)> gram = [&a](const Vec& v) -> Vec { return a.adjoint() * (a * v); };
  return largest_singular_value<Complex>(gram, a.cols(), opts).value;
}

double UnitaryTuple::unitarity_residual() const {
  double worst = 0.0;
  for (const auto& m : matrices) {
    worst = std::max(worst, (m.adjoint() * m - MatrixXc::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff());
  }
  return worst;
}

MatrixXc haar_unitary(int N, Rng& rng) {
  require(N >= 1, "haar_unitary: N must be positive");
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXc g(N, N);
  const double scale = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = Complex(re * scale, im * scale);
    }
  }
  Eigen::HouseholderQR<MatrixXc> qr(g);
  MatrixXc q = qr.householderQ() * MatrixXc::Identity(N, N);
  const MatrixXc& r = qr.matrixQR();
  for (int j = 0; j < N; ++j) {
    const Complex d = r(j, j);
    const double ad = std::abs(d);
    q.col(j) *= ad > 0 ? d / ad : Complex(1.0);
  }
  return q;
}

UnitaryTuple haar_tuple(int n, int N, std::uint64_t seed) {
  require(n >= 1 && N >= 1, "haar_tuple: n and N must be positive");
  UnitaryTuple out;
  out.n = n;
  out.N = N;
  out.seed = seed;
  for (int j = 0; j < n; ++j) {
    Rng rng(stream_seed(seed, static_cast<std::uint64_t>(j)));
    out.matrices.push_back(haar_unitary(N, rng));
  }
  if (out.unitarity_residual() > tol::kUnitarity) throw ConstructionError("haar_tuple: unitarity residual above 1e-10");
  return out;
}

UnitaryTuple identity_tuple(int n, int N) {
  require(n >= 1 && N >= 1, "identity_tuple: n and N must be positive");
  UnitaryTuple out;
  out.n = n;
  out.N = N;
  out.matrices.assign(static_cast<std::size_t>(n), MatrixXc::Identity(N, N));
  return out;
}

DefectResult defect(const UnitaryTuple& u, const PowerIterationOptions& options) {
  check_tuple(u);
  DefectResult out;
  const int N = u.N;
  if (N == 1) {
    // No traceless matrices.
    out.converged = true;
    return out;
  }
  bool all_equal = true;
  for (const auto& m : u.matrices) all_equal = all_equal && m == u.matrices.front();
  if (all_equal) {
    // n times a conjugation, an isometry of the traceless matrices.
    out.value = 1.0;
    out.converged = true;
    return out;
  }
  std::function<Vec(const Vec&)> gram = [&u, N](const Vec& v) -> Vec {
    Eigen::Map<const MatrixXc> x(v.data(), N, N);
    MatrixXc y = MatrixXc::Zero(N, N);
    for (const auto& m : u.matrices) y.noalias() += m * x * m.adjoint();
    MatrixXc z = MatrixXc::Zero(N, N);
    for (const auto& m : u.matrices) z.noalias() += m.adjoint() * y * m;
    return Eigen::Map<const Vec>(z.data(), N * N);
  };
  std::function<void(Vec&)> project = [N](Vec& v) { project_traceless(v, N); };
  PowerIterationResult r = largest_singular_value<Complex>(gram, static_cast<Eigen::Index>(N) * N, options, project);
  out.value = std::min(1.0, r.value / u.n);
  out.iterations = r.iterations;
  out.converged = r.converged;
  out.starts_agree = r.starts_agree;
  return out;
}

double defect_dense(const UnitaryTuple& u) {
  check_tuple(u);
  require(u.N <= 16, "defect_dense: N <= 16 only");
  const int N = u.N;
  if (N == 1) return 0.0;
  const int d = N * N;
  MatrixXc m = MatrixXc::Zero(d, d);
  for (const auto& x : u.matrices) m += kron(x, x.conjugate());
  Vec e = Vec::Zero(d);
  for (int i = 0; i < N; ++i) e(i * N + i) = 1.0 / std::sqrt(static_cast<double>(N));
  MatrixXc proj = MatrixXc::Identity(d, d) - e * e.adjoint();
  Eigen::JacobiSVD<MatrixXc> svd(m * proj);
  return std::min(1.0, svd.singularValues()(0) / u.n);
}

double cache_defect(UnitaryTuple& u) {
  if (u.defect < 0.0) u.defect = defect(u).value;
  return u.defect;
}

PowerIterationResult kron_sum_norm(const std::vector<MatrixXc>& a, const std::vector<MatrixXc>& b,
                                   const PowerIterationOptions& options) {
  require(a.size() == b.size() && !a.empty(), "kron_sum_norm: coefficient lists must match and be nonempty");
  const Eigen::Index p = a.front().rows();
  const Eigen::Index q = b.front().rows();
  for (std::size_t j = 0; j < a.size(); ++j) {
    require(a[j].rows() == p && a[j].cols() == p && b[j].rows() == q && b[j].cols() == q,
            "kron_sum_norm: coefficient sizes differ");
  }
  const Eigen::Index dim = p * q;
  if (p <= kMaxDenseKron && q <= kMaxDenseKron) {
    MatrixXc m = MatrixXc::Zero(dim, dim);
    for (std::size_t j = 0; j < a.size(); ++j) m += kron(a[j], b[j]);
    if (dim <= kMaxEigenKron) {
      // Small enough for a direct Hermitian eigensolve of M*M.
      Eigen::SelfAdjointEigenSolver<MatrixXc> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
      PowerIterationResult r;
      r.value = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
      r.converged = es.info() == Eigen::Success;
      return r;
    }
    std::function<Vec(const Vec&)> gram = [&m](const Vec& v) -> Vec { return m.adjoint() * (m * v); };
    return largest_singular_value<Complex>(gram, dim, options);
  }
  // (A (x) B) vec(X) = vec(B X A^T) for column-major vec, X of size q x p.
  std::function<Vec(const Vec&)> gram = [&a, &b, p, q](const Vec& v) -> Vec {
    Eigen::Map<const MatrixXc> x(v.data(), q, p);
    MatrixXc y = MatrixXc::Zero(q, p);
    for (std::size_t j = 0; j < a.size(); ++j) y.noalias() += b[j] * x * a[j].transpose();
    MatrixXc z = MatrixXc::Zero(q, p);
    for (std::size_t j = 0; j < a.size(); ++j) z.noalias() += b[j].adjoint() * y * a[j].conjugate();
    return Eigen::Map<const Vec>(z.data(), p * q);
  };
  return largest_singular_value<Complex>(gram, dim, options);
}

double overlap_norm(const UnitaryTuple& s, const UnitaryTuple& t) {
  check_tuple(s);
  check_tuple(t);
  require(s.n == t.n && s.N == t.N, "overlap_norm: tuples of different shape");
  std::vector<MatrixXc> tbar;
  for (const auto& m : t.matrices) tbar.push_back(m.conjugate());
  return kron_sum_norm(s.matrices, tbar).value;
}

SeparatedUnitaryFamily separated_family(int n, int N, double epsilon, double delta, int max_samples,
                                        std::uint64_t seed, double beta) {
  require(epsilon > 0.0 && epsilon < 1.0, "separated_family: epsilon must lie in (0,1)");
  require(delta > 0.0 && delta < 1.0, "separated_family: delta must lie in (0,1)");
  require(max_samples >= 0, "separated_family: max_samples must be nonnegative");
  SeparatedUnitaryFamily out;
  out.n = n;
  out.N = N;
  out.epsilon = epsilon;
  out.delta = delta;
  out.beta = beta;
  out.target = LogLevelNumber::FromLog(beta * n * static_cast<double>(N) * N);
  const double threshold = (1.0 - delta) * n;
  std::vector<std::vector<double>> overlaps;
  for (int k = 0; k < max_samples; ++k) {
    UnitaryTuple u = haar_tuple(n, N, stream_seed(seed, static_cast<std::uint64_t>(k)));
    ++out.sampled;
    if (cache_defect(u) > epsilon) continue;
    ++out.in_s_eps;
    std::vector<double> row;
    bool separated = true;
    for (const auto& a : out.members) {
      const double o = overlap_norm(a, u);
      if (o > threshold) {
        separated = false;
        break;
      }
      row.push_back(o);
    }
    if (!separated) continue;
    overlaps.push_back(row);
    out.members.push_back(std::move(u));
  }
  const auto m = static_cast<Eigen::Index>(out.members.size());
  out.pairwise_overlaps = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.pairwise_overlaps(i, i) = overlap_norm(out.members[static_cast<std::size_t>(i)], out.members[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < i; ++j) {
      out.pairwise_overlaps(i, j) = out.pairwise_overlaps(j, i) = overlaps[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return out;
}

FamilyCheck reverify_family(const SeparatedUnitaryFamily& family) {
  FamilyCheck out;
  const double threshold = (1.0 - family.delta) * family.n;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& u = family.members[i];
    out.max_unitarity_residual = std::max(out.max_unitarity_residual, u.unitarity_residual());
    const double d = defect(u).value;
    out.max_defect = std::max(out.max_defect, d);
    out.max_self_overlap_error = std::max(out.max_self_overlap_error, std::abs(overlap_norm(u, u) - family.n));
    for (std::size_t j = 0; j < i; ++j) out.max_overlap = std::max(out.max_overlap, overlap_norm(u, family.members[j]));
  }
  out.ok = out.max_defect <= family.epsilon && out.max_overlap <= threshold && out.max_self_overlap_error <= 1e-8 &&
           out.max_unitarity_residual <= tol::kUnitarity;
  return out;
}

OperatorSpaceFx make_Fx(const SeparatedUnitaryFamily& family, const std::vector<int>& subset) {
  OperatorSpaceFx out;
  out.n = family.n;
  out.N = family.N;
  std::set<int> seen;
  for (int idx : subset) {
    require(idx >= 0 && idx < static_cast<int>(family.size()), "make_Fx: index outside the family");
    require(seen.insert(idx).second, "make_Fx: repeated index");
    out.x.push_back(family.members[static_cast<std::size_t>(idx)]);
  }
  return out;
}

double fx_norm_level1(const OperatorSpaceFx& F, const VectorXc& a) {
  require(a.size() == F.n, "fx_norm_level1: expected n coefficients");
  double best = a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
  for (const auto& t : F.x) {
    MatrixXc sum = MatrixXc::Zero(F.N, F.N);
    for (int j = 0; j < F.n; ++j) sum += a(j) * t.matrices[static_cast<std::size_t>(j)];
    best = std::max(best, spectral_norm_power(sum));
  }
  return best;
}

double fx_norm_levelN(const OperatorSpaceFx& F, const std::vector<MatrixXc>& A) {
  require(static_cast<int>(A.size()) == F.n, "fx_norm_levelN: expected n coefficients");
  double best = 0.0;
  for (const auto& m : A) {
    require(m.rows() == m.cols(), "fx_norm_levelN: coefficients must be square");
    best = std::max(best, spectral_norm_power(m));
  }
  for (const auto& t : F.x) best = std::max(best, kron_sum_norm(A, t.matrices).value);
  return best;
}

std::vector<MatrixXc> conjugate_coefficients(const UnitaryTuple& s) {
  std::vector<MatrixXc> out;
  for (const auto& m : s.matrices) out.push_back(m.conjugate());
  return out;
}

DnCertificate dn_identity_certificate(const SeparatedUnitaryFamily& family, const std::vector<int>& x,
                                      const std::vector<int>& y) {
  require(x.size() == y.size(), "dn_identity_certificate: x and y must have equal cardinality");
  std::set<int> xs(x.begin(), x.end());
  std::set<int> ys(y.begin(), y.end());
  require(xs != ys, "dn_identity_certificate: x and y must differ");
  require((1.0 - family.delta) * family.n >= 1.0, "dn_identity_certificate: need (1 - delta) n >= 1");
  DnCertificate out;
  for (int idx : xs) {
    if (!ys.count(idx)) {
      out.witness = idx;
      break;
    }
  }
  if (out.witness < 0) throw ConstructionError("dn_identity_certificate: x is contained in y");
  const auto coeffs = conjugate_coefficients(family.members[static_cast<std::size_t>(out.witness)]);
  out.source_norm = fx_norm_levelN(make_Fx(family, x), coeffs);
  out.target_norm = fx_norm_levelN(make_Fx(family, y), coeffs);
  out.implied_ratio = out.source_norm / out.target_norm;
  return out;
}

TailExperiment trace_tail_experiment(int n, int N, double s, int samples, std::uint64_t seed) {
  require(n >= 1 && N >= 1, "trace_tail_experiment: n and N must be positive");
  require(samples >= 100, "trace_tail_experiment: need at least 100 samples");
  TailExperiment out;
  out.n = n;
  out.N = N;
  out.s = s;
  out.samples = samples;
  std::int64_t hits = 0;
  for (int k = 0; k < samples; ++k) {
    UnitaryTuple v = haar_tuple(n, N, stream_seed(seed, static_cast<std::uint64_t>(k)));
    double re = 0.0;
    for (const auto& m : v.matrices) re += m.trace().real();
    if (re / N > s) ++hits;
  }
  out.frequency = static_cast<double>(hits) / samples;
  out.standard_error = std::sqrt(out.frequency * (1.0 - out.frequency) / samples);
  const double exponent = s * s * N * N / static_cast<double>(n);
  for (double c : {0.25, 0.5, 1.0}) out.reference.emplace_back(c, std::exp(-c * exponent));
  out.fitted_c = (out.frequency > 0.0 && exponent > 0.0) ? -std::log(out.frequency) / exponent
                                                          : std::numeric_limits<double>::quiet_NaN();
  const double sd = std::sqrt(n / (2.0 * N * N));
  out.gaussian_prediction = 0.5 * std::erfc(s / sd / std::sqrt(2.0));
  return out;
}

AverageDefectTable average_defect_constant(const std::vector<int>& n_list, int N, int samples, std::uint64_t seed,
                                           double epsilon) {
  require(samples >= 1, "average_defect_constant: need at least one sample");
  require(epsilon > 0.0 && epsilon < 1.0, "average_defect_constant: epsilon must lie in (0,1)");
  AverageDefectTable out;
  out.N = N;
  out.samples = samples;
  out.epsilon = epsilon;
  std::vector<std::vector<double>> defects;
  for (int n : n_list) {
    require(n >= 1, "average_defect_constant: n must be positive");
    AverageDefectRow row;
    row.n = n;
    std::vector<double> d;
    for (int k = 0; k < samples; ++k) {
      UnitaryTuple u = haar_tuple(n, N, derive_seed(seed, "qexpander", "average_defect", static_cast<std::uint64_t>(n) * 100003ULL + k));
      d.push_back(defect(u).value);
    }
    double mean = 0.0;
    for (double x : d) mean += x * n;
    row.mean_norm = mean / samples;
    row.ratio = row.mean_norm / std::sqrt(static_cast<double>(n));
    out.fitted_constant = std::max(out.fitted_constant, row.ratio);
    defects.push_back(std::move(d));
    out.rows.push_back(row);
  }
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    auto& row = out.rows[i];
    std::int64_t inside = 0;
    for (double x : defects[i]) inside += x <= epsilon;
    row.membership = static_cast<double>(inside) / samples;
    row.membership_bound = 1.0 - out.fitted_constant / epsilon / std::sqrt(static_cast<double>(row.n));
    out.within_envelope = out.within_envelope && row.ratio <= out.envelope;
    if (i > 0 && row.ratio > out.rows[i - 1].ratio) out.non_increasing = false;
  }
  return out;
}

CounterexampleResult identity_counterexample(int n, int N, double delta, int samples, std::uint64_t seed) {
  require(n >= 1 && N >= 1, "identity_counterexample: n and N must be positive");
  require(delta >= 0.0 && delta <= 1.0, "identity_counterexample: delta must lie in [0,1]");
  require(samples >= 1, "identity_counterexample: need at least one sample");
  CounterexampleResult out;
  out.n = n;
  out.N = N;
  out.delta = delta;
  out.samples = samples;
  const double threshold = (1.0 - delta) * n;
  std::int64_t hits = 0;
  for (int k = 0; k < samples; ++k) {
    UnitaryTuple v = haar_tuple(n, N, stream_seed(seed, static_cast<std::uint64_t>(k)));
    MatrixXc sum = MatrixXc::Zero(N, N);
    for (const auto& m : v.matrices) sum += m;
    // Strict inequality, with room for rounding in the norm.
    if (spectral_norm_power(sum, seed) > threshold + 1e-10 * n) ++hits;
  }
  out.frequency = static_cast<double>(hits) / samples;
  out.reference_nN = std::exp(-static_cast<double>(n) * N);
  out.reference_nN2 = std::exp(-static_cast<double>(n) * N * N);
  return out;
}

EpsChain eps_chain(double delta) {
  require(delta > 0.0 && delta < 1.0, "eps_chain: delta must lie in (0,1)");
  EpsChain out;
  out.epsilon_prime = std::pow((1.0 - delta) / 6.0, 3);
  out.epsilon = (1.0 - delta) / 4.0;
  out.xi = out.epsilon_prime / 4.0;
  out.identity_residual = std::abs((1.0 - delta) - 3.0 * std::cbrt(out.epsilon_prime) - 2.0 * out.epsilon);
  if (out.identity_residual > 1e-12) throw ConstructionError("eps_chain: 1 - delta != 3 eps'^(1/3) + 2 eps");
  return out;
}

}  // namespace bmlab
