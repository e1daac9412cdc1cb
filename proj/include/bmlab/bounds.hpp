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

#ifndef BMLAB_BOUNDS_HPP
#define BMLAB_BOUNDS_HPP

#include <cmath>

#include "bmlab/loglevel.hpp"

namespace bmlab {

struct LowerChain {
  int n = 0;
  double theta = 0.0;
  double r = 0.0;
  double eta = 0.0;
  /// log K with K = e^(theta^2 n / 2) / 2 (kept in logs; K itself may overflow).
  double log_K = 0.0;
  /// K / 2 = lower bound for log |A|; +inf when it overflows a double.
  double half_K = 0.0;
  /// 4 n^3 / eta.
  double penalty = 0.0;
  /// log e^(theta^2 n / 4), i.e. theta^2 n / 4, and the target e^(theta^2 n / 4).
  double log_target = 0.0;
  double target = 0.0;
  /// Lower bound for |X| (level 2 when it exceeds e^1).
  LogLevelNumber X_lower;
  bool passes = false;
  /// Smallest n at which the chain passes for these theta, r.
  int n0_hint = 0;
};

/// log|X| >= K/2 - 4 n^3 / eta with eta = 1/(r theta) - 1, compared against e^(theta^2 n / 4).
LowerChain lower_chain(int n, double theta, double r);

/// True when the lower chain passes at n (no n0 search).
bool lower_chain_passes(int n, double theta, double r);

struct LiminfConstants {
  /// 1 / (2 r^2).
  double remark = 0.0;
  /// theta^2 / 4 at theta = 1/r.
  double chain = 0.0;
  /// |theta^2/2 - 1/(2 r^2)| at theta = 1/r.
  double identity_residual = 0.0;
};

/// Returns 1/(2 r^2) with the side-by-side exponents; r >= 1.
LiminfConstants liminf_constant(double r);

struct UpperChain {
  int n = 0;
  double eps = 0.0;
  /// floor((1 + 2/eps)^n), or the unrounded value when it exceeds 2^53.
  double m = 0.0;
  double log_m = 0.0;
  /// n m log(3n/eps): the bound on log N.
  LogLevelNumber log_N;
  /// The bound on N itself.
  LogLevelNumber N_bound;
};

UpperChain upper_chain(int n, double eps);

struct ClaimBound {
  double eta = 0.0;
  /// log of the bound.
  double log_bound = 0.0;
  LogLevelNumber bound;
};

/// (1 + 4n/eta)^(2 n^2) with 1 + eta = 1/(r (1 - delta)).
ClaimBound os_claim_counter(int n, double r, double delta);

struct MeasureChain {
  int n = 0;
  int N = 0;
  double delta = 0.0;
  double c_assumed = 0.0;
  double gamma = 0.0;
  double epsilon = 0.0;
  double epsilon_prime = 0.0;
  /// log (4 gamma / eps')^(4 N^2).
  double log_net_factor = 0.0;
  /// c (eps'/2)^2 N^2 n.
  double exponent = 0.0;
  double log_bound = 0.0;
  LogLevelNumber bound;
  /// (1/2) c (eps'/2)^2.
  double c_delta = 0.0;
  /// Smallest n with (4 gamma / eps')^4 <= e^(c_delta n).
  double n_delta_hint = 0.0;
  /// log_bound <= -c_delta n N^2.
  bool below_target = false;
};

MeasureChain measure_chain(int n, int N, double delta, double c_assumed = 0.5, double gamma = 6.0);

struct HHIteration {
  double r_input = 0.0;
  /// 2^(k+1), the power of two nearest to r_input.
  double r = 0.0;
  int k = 0;
  bool rounded = false;
  /// log of 2^k exp(4 n N^2 2^-k).
  double log_bound = 0.0;
  LogLevelNumber bound;
  /// n >= (r log r) / 4 with the input r.
  bool condition_holds = false;
  /// log of exp(8 n N^2 / 2^k); meaningful only when the condition holds.
  double log_headline = 0.0;
};

HHIteration hh_iteration(int n, int N, double r);

struct SphericalBound {
  double gamma = 0.0;
  double log_bound = 0.0;
  LogLevelNumber bound;
  /// 4 n^2 / theta^2.
  double threshold = 0.0;
  bool significant = false;
};

/// gamma 2^K K^(-1/2) exp(-4 n^2 / theta^2); gamma defaults to sqrt(2/pi).
SphericalBound spherical_variant_bound(int n, double theta, double K_theta, double gamma = std::sqrt(2.0 / 3.14159265358979323846));

}  // namespace bmlab

#endif  // BMLAB_BOUNDS_HPP
