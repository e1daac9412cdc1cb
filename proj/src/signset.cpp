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

#include "bmlab/signset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "bmlab/common.hpp"
#include "bmlab/rng.hpp"

namespace bmlab {

namespace {

constexpr int kMaxExhaustiveDim = 25;

// Sign vector packed one bit per coordinate, bit set <=> entry -1.
using Packed = std::vector<std::uint64_t>;

int packed_inner(const Packed& a, const Packed& b, int n) {
  int differ = 0;
  for (std::size_t w = 0; w < a.size(); ++w) differ += std::popcount(a[w] ^ b[w]);
  return n - 2 * differ;
}

Packed pack_index(std::uint64_t index, int n) {
  // Coordinate j is bit (n-1-j) of the lexicographic index.
  Packed p((static_cast<std::size_t>(n) + 63) / 64, 0);
  for (int j = 0; j < n; ++j) {
    if ((index >> (n - 1 - j)) & 1ULL) p[static_cast<std::size_t>(j) / 64] |= 1ULL << (j % 64);
  }
  return p;
}

Packed pack_row(const Eigen::MatrixXi& m, Eigen::Index row) {
  const int n = static_cast<int>(m.cols());
  Packed p((static_cast<std::size_t>(n) + 63) / 64, 0);
  for (int j = 0; j < n; ++j) {
    if (m(row, j) < 0) p[static_cast<std::size_t>(j) / 64] |= 1ULL << (j % 64);
  }
  return p;
}

Eigen::MatrixXi unpack_all(const std::vector<Packed>& packed, int n) {
  Eigen::MatrixXi out(static_cast<Eigen::Index>(packed.size()), n);
  for (std::size_t r = 0; r < packed.size(); ++r) {
    for (int j = 0; j < n; ++j) {
      const bool neg = (packed[r][static_cast<std::size_t>(j) / 64] >> (j % 64)) & 1ULL;
      out(static_cast<Eigen::Index>(r), j) = neg ? -1 : 1;
    }
  }
  return out;
}

int limit_for(double theta, int n) { return static_cast<int>(std::floor(theta * n + 1e-9)); }

void check_theta(double theta) {
  require(theta > 0.0 && theta < 1.0, "sign set: theta must lie in (0,1)");
}

}  // namespace

int SignSet::correlation_limit() const { return limit_for(theta, n); }

double hoeffding_tail(double theta, int n) {
  require(theta > 0.0 && theta <= 1.0, "hoeffding_tail: theta must lie in (0,1]");
  require(n >= 0, "hoeffding_tail: n must be nonnegative");
  return 2.0 * std::exp(-theta * theta * n / 2.0);
}

double log_binomial(int n, int k) {
  require(k >= 0 && k <= n, "log_binomial: need 0 <= k <= n");
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double exact_rademacher_tail(double theta, int n) {
  require(n >= 0, "exact_rademacher_tail: n must be nonnegative");
  // sum = 2k - n where k counts +1 entries.
  if (n <= 60) {
    std::uint64_t count = 0;
    std::uint64_t binom = 1;
    for (int k = 0; k <= n; ++k) {
      if (std::abs(2 * k - n) > theta * n) count += binom;
      binom = binom * static_cast<std::uint64_t>(n - k) / static_cast<std::uint64_t>(k + 1);
    }
    return std::ldexp(static_cast<double>(count), -n);
  }
  double p = 0.0;
  for (int k = 0; k <= n; ++k) {
    if (std::abs(2 * k - n) > theta * n) p += std::exp(log_binomial(n, k) - n * std::log(2.0));
  }
  return p;
}

SignSet greedy_sign_set(int n, double theta, SamplingMode mode, std::uint64_t seed) {
  require(n >= 1, "greedy_sign_set: n must be positive");
  check_theta(theta);
  const int limit = limit_for(theta, n);
  std::vector<Packed> accepted;
  auto admissible = [&](const Packed& cand) {
    for (const Packed& t : accepted) {
      if (std::abs(packed_inner(cand, t, n)) > limit) return false;
    }
    return true;
  };

  SignSet out;
  out.n = n;
  out.theta = theta;
  out.exhaustive = mode.exhaustive;
  if (mode.exhaustive) {
    if (n > kMaxExhaustiveDim) {
      throw ResourceGuardError("greedy_sign_set: exhaustive mode requires n <= 25");
    }
    const std::uint64_t total = 1ULL << n;
    for (std::uint64_t i = 0; i < total; ++i) {
      Packed cand = pack_index(i, n);
      if (admissible(cand)) accepted.push_back(std::move(cand));
    }
    out.pool_size = static_cast<std::int64_t>(total);
  } else {
    require(mode.count >= 1, "greedy_sign_set: sampled mode requires count >= 1");
    Rng rng(seed);
    const std::size_t words = (static_cast<std::size_t>(n) + 63) / 64;
    for (std::int64_t s = 0; s < mode.count; ++s) {
      Packed cand(words, 0);
      for (std::size_t w = 0; w < words; ++w) cand[w] = rng();
      if (n % 64 != 0) cand.back() &= (1ULL << (n % 64)) - 1;
      bool duplicate = false;
      for (const Packed& t : accepted) duplicate = duplicate || t == cand;
      if (!duplicate && admissible(cand)) accepted.push_back(std::move(cand));
    }
    out.pool_size = mode.count;
  }
  out.vectors = unpack_all(accepted, n);

  if (mode.exhaustive) {
    const double required = 0.5 * std::exp(theta * theta * n / 2.0);
    if (static_cast<double>(out.size()) < required) {
      std::ostringstream msg;
      msg << "greedy_sign_set: size " << out.size() << " below guaranteed " << required;
      throw ConstructionError(msg.str());
    }
  }
  return out;
}

bool is_separated(const SignSet& set) {
  const int limit = set.correlation_limit();
  for (Eigen::Index i = 0; i < set.size(); ++i) {
    if ((set.vectors.row(i).array().abs() != 1).any()) return false;
    for (Eigen::Index j = i + 1; j < set.size(); ++j) {
      if (set.vectors.row(i) == set.vectors.row(j)) return false;
      if (std::abs(set.inner(i, j)) > limit) return false;
    }
  }
  return true;
}

bool is_maximal(const SignSet& set) {
  if (set.n > kMaxExhaustiveDim) throw ResourceGuardError("is_maximal: requires n <= 25");
  const int n = set.n;
  const int limit = set.correlation_limit();
  std::vector<Packed> members;
  for (Eigen::Index r = 0; r < set.size(); ++r) members.push_back(pack_row(set.vectors, r));
  std::set<Packed> member_set(members.begin(), members.end());
  const std::uint64_t total = 1ULL << n;
  for (std::uint64_t i = 0; i < total; ++i) {
    Packed cand = pack_index(i, n);
    if (member_set.contains(cand)) continue;
    bool blocked = false;
    for (const Packed& t : members) {
      if (std::abs(packed_inner(cand, t, n)) > limit) {
        blocked = true;
        break;
      }
    }
    if (!blocked) return false;
  }
  return true;
}

SignSet drop_to_even(const SignSet& set) {
  SignSet out = set;
  if (out.size() % 2 == 1) out.vectors.conservativeResize(out.size() - 1, Eigen::NoChange);
  return out;
}

Antichain antichain_half_subsets(int K, SamplingMode mode, std::uint64_t seed) {
  require(K >= 2, "antichain_half_subsets: K must be >= 2");
  if (K % 2 != 0) {
    throw PreconditionError(
        "antichain_half_subsets: K must be even; drop one element of the ground set "
        "(removing one point does not spoil the estimates)");
  }
  const int half = K / 2;
  Antichain out;
  out.ground_size = K;
  out.exhaustive = mode.exhaustive;
  out.seed = seed;
  out.log_full_cardinality = log_binomial(K, half);
  out.full_cardinality = std::round(std::exp(out.log_full_cardinality));

  if (mode.exhaustive) {
    if (out.full_cardinality > 1e6) {
      throw ResourceGuardError("antichain_half_subsets: exhaustive mode requires binomial(K,K/2) <= 1e6");
    }
    std::vector<int> current(static_cast<std::size_t>(half));
    std::iota(current.begin(), current.end(), 0);
    while (true) {
      out.subsets.push_back(current);
      int i = half - 1;
      while (i >= 0 && current[static_cast<std::size_t>(i)] == K - half + i) --i;
      if (i < 0) break;
      ++current[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < half; ++j) current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j) - 1] + 1;
    }
    if (K >= 8 && static_cast<double>(out.subsets.size()) < std::exp(K / 2.0)) {
      throw ConstructionError("antichain_half_subsets: |A| >= exp(K/2) failed");
    }
    return out;
  }

  require(mode.count >= 1, "antichain_half_subsets: sampled mode requires count >= 1");
  require(out.log_full_cardinality >= std::log(static_cast<double>(mode.count)) - 1e-9,
          "antichain_half_subsets: more samples requested than distinct subsets exist");
  Rng rng(seed);
  std::set<std::vector<int>> seen;
  std::vector<int> ground(static_cast<std::size_t>(K));
  const std::int64_t max_attempts = 1000 * mode.count + 1000;
  for (std::int64_t attempt = 0; attempt < max_attempts && static_cast<std::int64_t>(out.subsets.size()) < mode.count;
       ++attempt) {
    std::iota(ground.begin(), ground.end(), 0);
    for (int i = 0; i < half; ++i) {
      std::uniform_int_distribution<int> pick(i, K - 1);
      std::swap(ground[static_cast<std::size_t>(i)], ground[static_cast<std::size_t>(pick(rng))]);
    }
    std::vector<int> subset(ground.begin(), ground.begin() + half);
    std::sort(subset.begin(), subset.end());
    if (seen.insert(subset).second) out.subsets.push_back(std::move(subset));
  }
  return out;
}

bool is_antichain(const Antichain& family) {
  const std::size_t half = static_cast<std::size_t>(family.ground_size / 2);
  for (std::size_t i = 0; i < family.subsets.size(); ++i) {
    const auto& a = family.subsets[i];
    if (a.size() != half) return false;
    for (std::size_t j = i + 1; j < family.subsets.size(); ++j) {
      const auto& b = family.subsets[j];
      if (std::includes(a.begin(), a.end(), b.begin(), b.end()) ||
          std::includes(b.begin(), b.end(), a.begin(), a.end())) {
        return false;
      }
    }
  }
  return true;
}

SphericalCode greedy_spherical_code(int n, double theta, std::int64_t samples, std::uint64_t seed) {
  require(n >= 1, "greedy_spherical_code: n must be positive");
  require(theta >= 0.0 && theta < 1.0, "greedy_spherical_code: theta must lie in [0,1)");
  require(samples >= 1, "greedy_spherical_code: samples must be >= 1");
  Rng rng(seed);
  std::vector<Eigen::VectorXd> accepted;
  for (std::int64_t s = 0; s < samples; ++s) {
    Eigen::VectorXd p = random_unit_vector(n, rng);
    bool ok = true;
    for (const auto& q : accepted) {
      if (std::abs(p.dot(q)) > theta + tol::kCoherence) {
        ok = false;
        break;
      }
    }
    if (ok) accepted.push_back(std::move(p));
  }
  SphericalCode out;
  out.n = n;
  out.theta = theta;
  out.samples = samples;
  out.points.resize(static_cast<Eigen::Index>(accepted.size()), n);
  for (std::size_t i = 0; i < accepted.size(); ++i) out.points.row(static_cast<Eigen::Index>(i)) = accepted[i].transpose();
  return out;
}

bool is_coherent(const SphericalCode& code) {
  for (Eigen::Index i = 0; i < code.size(); ++i) {
    if (std::abs(code.points.row(i).norm() - 1.0) > 1e-12) return false;
    for (Eigen::Index j = i + 1; j < code.size(); ++j) {
      if (std::abs(code.points.row(i).dot(code.points.row(j))) > code.theta + tol::kCoherence) return false;
    }
  }
  return true;
}

}  // namespace bmlab
