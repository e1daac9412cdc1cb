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

#ifndef BMLAB_QEXPANDER_HPP
#define BMLAB_QEXPANDER_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "bmlab/common.hpp"
#include "bmlab/loglevel.hpp"
#include "bmlab/rng.hpp"

namespace bmlab {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

struct PowerIterationOptions {
  /// Stop when successive Rayleigh quotients differ by <= tolerance * quotient.
  double tolerance = 1e-12;
  int max_iterations = 10000;
  /// Independent random starts; their results must agree to `agreement`.
  int starts = 2;
  double agreement = 1e-8;
  std::uint64_t seed = 0;
};

struct PowerIterationResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  bool starts_agree = true;
  double spread = 0.0;
};

namespace detail {

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> random_start(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if constexpr (std::is_same_v<Scalar, double>) {
      v(i) = gauss(rng);
    } else {
      const double re = gauss(rng);
      v(i) = Scalar(re, gauss(rng));
    }
  }
  return v;
}

}  // namespace detail

/// Largest singular value of A from the action of A*A, by power iteration.
/// `project` (optional) is applied to every iterate, e.g. to stay in an
/// invariant subspace. Each start returns a Rayleigh-quotient lower bound, so
/// the reported value is the best of the starts.
template <typename Scalar>
PowerIterationResult largest_singular_value(
    const std::function<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&)>& gram,
    Eigen::Index dim, const PowerIterationOptions& options = {},
    const std::function<void(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&)>& project = nullptr) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  PowerIterationResult out;
  if (dim == 0) {
    out.converged = true;
    return out;
  }
  std::vector<double> values;
  bool all_converged = true;
  for (int start = 0; start < options.starts; ++start) {
    Rng rng(stream_seed(options.seed, static_cast<std::uint64_t>(start)));
    Vec v = detail::random_start<Scalar>(dim, rng);
    if (project) project(v);
    double previous = -1.0;
    double rq = 0.0;
    bool converged = false;
    int it = 0;
    for (; it < options.max_iterations; ++it) {
      double nv = v.norm();
      if (nv < 1e-200) {
        // Start landed in the kernel: re-randomize.
        v = detail::random_start<Scalar>(dim, rng);
        if (project) project(v);
        nv = v.norm();
        if (nv < 1e-200) break;
      }
      v /= nv;
      Vec w = gram(v);
      if (project) project(w);
      rq = std::real(v.dot(w));
      if (previous >= 0.0 && std::abs(rq - previous) <= options.tolerance * std::max(rq, 1e-300)) {
        converged = true;
        ++it;
        break;
      }
      previous = rq;
      v = w;
    }
    out.iterations = std::max(out.iterations, it);
    all_converged = all_converged && converged;
    values.push_back(std::sqrt(std::max(rq, 0.0)));
  }
  double lo = values.front();
  double hi = values.front();
  for (double x : values) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  out.value = hi;
  out.spread = hi - lo;
  out.starts_agree = out.spread <= options.agreement * std::max(1.0, hi);
  out.converged = all_converged;
  return out;
}

/// Spectral norm of a dense matrix by power iteration on A*A.
double spectral_norm_power(const MatrixXc& a, std::uint64_t seed = 0);

struct UnitaryTuple {
  int n = 0;
  int N = 0;
  std::vector<MatrixXc> matrices;
  std::uint64_t seed = 0;
  /// Cached defect; negative until computed.
  double defect = -1.0;

  /// max_j ||u_j* u_j - I|| (max entry).
  double unitarity_residual() const;
};

/// Haar unitary: QR of a complex Gaussian matrix with the phases of diag(R) removed.
MatrixXc haar_unitary(int N, Rng& rng);

UnitaryTuple haar_tuple(int n, int N, std::uint64_t seed);

/// (I, ..., I).
UnitaryTuple identity_tuple(int n, int N);

struct DefectResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  bool starts_agree = true;
};

/// n^-1 times the largest singular value of x -> sum_j u_j x u_j* on traceless
/// matrices, by power iteration with the trace projection at every step.
DefectResult defect(const UnitaryTuple& u, const PowerIterationOptions& options = {});

/// n^-1 ||sum_j u_j (x) conj(u_j) (1 - P)|| from the dense N^2 x N^2 matrix and an SVD (N <= 16).
double defect_dense(const UnitaryTuple& u);

/// Computes the defect once and stores it on the tuple.
double cache_defect(UnitaryTuple& u);

/// || sum_j a_j (x) b_j || in M_{N^2}: Hermitian eigensolve when N^2 <= 64, power iteration on
/// the materialized matrix for N <= 32, implicit beyond.
PowerIterationResult kron_sum_norm(const std::vector<MatrixXc>& a, const std::vector<MatrixXc>& b,
                                   const PowerIterationOptions& options = {});

/// || sum_j s_j (x) conj(t_j) ||.
double overlap_norm(const UnitaryTuple& s, const UnitaryTuple& t);

struct SeparatedUnitaryFamily {
  int n = 0;
  int N = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::vector<UnitaryTuple> members;
  /// Symmetric; diagonal holds the self-overlaps (= n).
  Eigen::MatrixXd pairwise_overlaps;
  std::int64_t sampled = 0;
  std::int64_t in_s_eps = 0;
  /// exp(beta n N^2) for the supplied beta (an unnamed constant, not a claim).
  double beta = 0.0;
  LogLevelNumber target;

  std::size_t size() const { return members.size(); }
};

/// Greedy rejection sampling of Haar tuples: keep defect <= epsilon, accept when
/// every overlap with the accepted members is <= (1 - delta) n.
SeparatedUnitaryFamily separated_family(int n, int N, double epsilon, double delta, int max_samples,
                                        std::uint64_t seed, double beta = 1.0);

struct FamilyCheck {
  bool ok = true;
  double max_defect = 0.0;
  double max_overlap = 0.0;
  double max_self_overlap_error = 0.0;
  double max_unitarity_residual = 0.0;
};

/// Recomputes every defect and every pairwise overlap from the stored matrices.
FamilyCheck reverify_family(const SeparatedUnitaryFamily& family);

/// Operator space spanned by u_j^x = e_jj (+) [(+)_{t in x} t_j].
struct OperatorSpaceFx {
  int n = 0;
  int N = 0;
  std::vector<UnitaryTuple> x;
};

OperatorSpaceFx make_Fx(const SeparatedUnitaryFamily& family, const std::vector<int>& subset);

/// max{ max_j |a_j| , max_{t in x} || sum_j a_j t_j || }.
double fx_norm_level1(const OperatorSpaceFx& F, const VectorXc& a);

/// max{ max_j ||A_j|| , max_{t in x} || sum_j A_j (x) t_j || }.
double fx_norm_levelN(const OperatorSpaceFx& F, const std::vector<MatrixXc>& A);

struct DnCertificate {
  /// Family index of the witness s in x \ y.
  int witness = -1;
  /// || sum_j conj(s_j) (x) u_j^x || (= n).
  double source_norm = 0.0;
  /// || sum_j conj(s_j) (x) u_j^y || (<= max{1, (1 - delta) n}).
  double target_norm = 0.0;
  double implied_ratio = 0.0;
};

/// Level-N identity witness for members x != y (index lists into the family).
DnCertificate dn_identity_certificate(const SeparatedUnitaryFamily& family, const std::vector<int>& x,
                                      const std::vector<int>& y);

/// The coefficients conj(s_j) of the witness.
std::vector<MatrixXc> conjugate_coefficients(const UnitaryTuple& s);

struct TailExperiment {
  int n = 0;
  int N = 0;
  double s = 0.0;
  int samples = 0;
  double frequency = 0.0;
  double standard_error = 0.0;
  /// (c, exp(-c s^2 N^2 / n)) for c in {1/4, 1/2, 1}.
  std::vector<std::pair<double, double>> reference;
  /// -n log(frequency) / (s^2 N^2); NaN when the frequency is 0 or s == 0.
  double fitted_c = 0.0;
  /// 1 - Phi(s / sqrt(n / (2 N^2))): the Gaussian prediction from the moments.
  double gaussian_prediction = 0.0;
};

/// Frequency of Re(N^-1 tr sum_j v_j) > s over seeded Haar tuples.
TailExperiment trace_tail_experiment(int n, int N, double s, int samples, std::uint64_t seed);

struct AverageDefectRow {
  int n = 0;
  /// Mean of || sum_j u_j (x) conj(u_j) (1 - P) || = n * defect.
  double mean_norm = 0.0;
  double ratio = 0.0;
  /// Fraction of samples with defect <= epsilon, and the bound 1 - (C/epsilon) n^-1/2.
  double membership = 0.0;
  double membership_bound = 0.0;
};

struct AverageDefectTable {
  int N = 0;
  int samples = 0;
  double epsilon = 0.0;
  std::vector<AverageDefectRow> rows;
  /// Largest ratio: the fitted constant.
  double fitted_constant = 0.0;
  double envelope = 3.0;
  bool within_envelope = true;
  /// Reported only.
  bool non_increasing = true;
};

AverageDefectTable average_defect_constant(const std::vector<int>& n_list, int N, int samples, std::uint64_t seed,
                                           double epsilon = 0.85);

struct CounterexampleResult {
  int n = 0;
  int N = 0;
  double delta = 0.0;
  int samples = 0;
  double frequency = 0.0;
  /// exp(-n N) and exp(-n N^2).
  double reference_nN = 0.0;
  double reference_nN2 = 0.0;
};

/// With u = (I, ..., I): frequency of || sum_j v_j || > (1 - delta) n.
CounterexampleResult identity_counterexample(int n, int N, double delta, int samples, std::uint64_t seed);

struct EpsChain {
  double epsilon = 0.0;
  double epsilon_prime = 0.0;
  double xi = 0.0;
  /// |(1 - delta) - 3 eps'^(1/3) - 2 eps|.
  double identity_residual = 0.0;
};

EpsChain eps_chain(double delta);

}  // namespace bmlab

#endif  // BMLAB_QEXPANDER_HPP
