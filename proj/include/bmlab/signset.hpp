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

#ifndef BMLAB_SIGNSET_HPP
#define BMLAB_SIGNSET_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace bmlab {

/// Candidate pool for the greedy constructions: either every point of
/// {-1,1}^n in lexicographic order ('+' before '-', first coordinate most
/// significant), or `count` seeded uniform draws.
struct SamplingMode {
  bool exhaustive = true;
  std::int64_t count = 0;

  static SamplingMode Exhaustive() { return {true, 0}; }
  static SamplingMode Sampled(std::int64_t count) { return {false, count}; }
};

/// A theta-separated family of sign vectors: |<s,t>| <= theta*n for s != t.
struct SignSet {
  int n = 0;
  double theta = 0.0;
  /// One sign vector (+-1 entries) per row, in acceptance order.
  Eigen::MatrixXi vectors;
  std::int64_t pool_size = 0;
  bool exhaustive = false;

  Eigen::Index size() const { return vectors.rows(); }
  /// Largest integer correlation allowed between distinct members.
  int correlation_limit() const;
  int inner(Eigen::Index i, Eigen::Index j) const { return vectors.row(i).dot(vectors.row(j)); }
};

/// 2 exp(-theta^2 n / 2): the two-sided tail bound for |sum of n Rademachers| > theta n.
double hoeffding_tail(double theta, int n);

/// Exact P(|sum_j w_j| > theta n) for uniform w in {-1,1}^n, by binomial enumeration.
double exact_rademacher_tail(double theta, int n);

/// Greedy maximal theta-separated sign set. Exhaustive mode scans all 2^n
/// candidates (n <= 25) and enforces |T| >= exp(theta^2 n / 2) / 2.
SignSet greedy_sign_set(int n, double theta, SamplingMode mode, std::uint64_t seed);

/// Full pairwise re-check of the separation invariant in integer arithmetic.
bool is_separated(const SignSet& set);

/// True when no point of {-1,1}^n outside the set can be added (n <= 25).
bool is_maximal(const SignSet& set);

/// Copy without the last member when the size is odd.
SignSet drop_to_even(const SignSet& set);

/// Family of (K/2)-element subsets of {0..K-1}.
struct Antichain {
  int ground_size = 0;
  /// Each subset sorted increasingly.
  std::vector<std::vector<int>> subsets;
  bool exhaustive = true;
  std::uint64_t seed = 0;
  /// binomial(K, K/2), as a double (the full family size even when sampled).
  double full_cardinality = 0.0;
  /// log binomial(K, K/2).
  double log_full_cardinality = 0.0;

  std::size_t size() const { return subsets.size(); }
};

/// log of binomial(n, k).
double log_binomial(int n, int k);

/// All half-size subsets (exhaustive, binomial(K,K/2) <= 1e6) or `count`
/// distinct uniform ones. Odd K is rejected.
Antichain antichain_half_subsets(int K, SamplingMode mode, std::uint64_t seed = 0);

/// Pairwise incomparability under inclusion.
bool is_antichain(const Antichain& family);

/// Unit vectors with pairwise |<s,t>| <= theta.
struct SphericalCode {
  int n = 0;
  double theta = 0.0;
  /// One point per row.
  Eigen::MatrixXd points;
  std::int64_t samples = 0;

  Eigen::Index size() const { return points.rows(); }
};

SphericalCode greedy_spherical_code(int n, double theta, std::int64_t samples, std::uint64_t seed);

bool is_coherent(const SphericalCode& code);

}  // namespace bmlab

#endif  // BMLAB_SIGNSET_HPP
