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

#include "bmlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bmlab/common.hpp"
#include "bmlab/qexpander.hpp"

namespace bmlab {

// ---------------------------------------------------------------- LogLevelNumber

LogLevelNumber::LogLevelNumber(int level, double value) : level_(level), value_(value) {
  require(level >= 0 && level <= 2, "LogLevelNumber: level must be 0, 1 or 2");
  canonicalize();
}

void LogLevelNumber::canonicalize() {
  while (level_ < 2 && value_ > kPromote) {
    value_ = std::log(value_);
    ++level_;
  }
}

double LogLevelNumber::log_value() const {
  switch (level_) {
    case 0:
      if (value_ < 0) throw PreconditionError("LogLevelNumber: log of a negative number");
      return std::log(value_);
    case 1:
      return value_;
    default:
      return std::exp(value_);
  }
}

double LogLevelNumber::loglog_value() const {
  switch (level_) {
    case 0:
      require(value_ > 1.0, "LogLevelNumber: log log needs a number above 1");
      return std::log(std::log(value_));
    case 1:
      require(value_ > 0.0, "LogLevelNumber: log log needs a number above 1");
      return std::log(value_);
    default:
      return value_;
  }
}

double LogLevelNumber::to_double() const {
  switch (level_) {
    case 0:
      return value_;
    case 1:
      return std::exp(value_);
    default:
      return std::exp(std::exp(value_));
  }
}

LogLevelNumber LogLevelNumber::operator*(const LogLevelNumber& other) const {
  if (level_ == 0 && other.level_ == 0) return FromValue(value_ * other.value_);
  const LogLevelNumber& a = level_ >= other.level_ ? *this : other;
  const LogLevelNumber& b = level_ >= other.level_ ? other : *this;
  require(!(b.level_ == 0 && b.value_ <= 0.0), "LogLevelNumber: products with nonpositive factors need level 0");
  if (a.level_ == 1) return FromLog(a.value_ + b.log_value());
  if (b.level_ == 2) {
    const double hi = std::max(a.value_, b.value_);
    const double lo = std::min(a.value_, b.value_);
    return FromLogLog(hi + std::log1p(std::exp(lo - hi)));
  }
  const double log_b = b.log_value();
  const double ratio = log_b * std::exp(-a.value_);
  if (1.0 + ratio > 0.0) return FromLogLog(a.value_ + std::log1p(ratio));
  return FromLog(std::exp(a.value_) + log_b);
}

LogLevelNumber LogLevelNumber::pow(double p) const {
  require(p > 0.0, "LogLevelNumber: exponent must be positive");
  switch (level_) {
    case 0:
      require(value_ > 0.0, "LogLevelNumber: power of a nonpositive number");
      return FromLog(p * std::log(value_));
    case 1:
      return FromLog(p * value_);
    default:
      return FromLogLog(value_ + std::log(p));
  }
}

std::partial_ordering LogLevelNumber::operator<=>(const LogLevelNumber& other) const {
  if (std::isnan(value_) || std::isnan(other.value_)) return std::partial_ordering::unordered;
  int la = level_;
  int lb = other.level_;
  double a = value_;
  double b = other.value_;
  // Lift the lower one. A nonpositive value sits below everything one level up.
  while (la < lb) {
    if (a <= 0.0) return std::partial_ordering::less;
    a = std::log(a);
    ++la;
  }
  while (lb < la) {
    if (b <= 0.0) return std::partial_ordering::greater;
    b = std::log(b);
    ++lb;
  }
  return a <=> b;
}

std::string LogLevelNumber::to_string() const {
  std::ostringstream out;
  out.precision(17);
  switch (level_) {
    case 0:
      out << value_;
      break;
    case 1:
      out << "exp(" << value_ << ")";
      break;
    default:
      out << "exp(exp(" << value_ << "))";
  }
  return out.str();
}

// ---------------------------------------------------------------- chains

namespace {

void check_lower(int n, double theta, double r) {
  require(n >= 1, "lower_chain: n must be positive");
  require(theta > 0.0 && theta < 1.0, "lower_chain: theta must lie in (0,1)");
  require(r > 1.0, "lower_chain: r must exceed 1");
  require(r * theta < 1.0, "lower_chain: need r < 1/theta (eta = 1/(r theta) - 1 must be positive)");
}

// log(K/2 - penalty) - theta^2 n / 4, or -inf when K/2 <= penalty.
double lower_margin(int n, double theta, double r, double* log_x) {
  const double eta = 1.0 / (r * theta) - 1.0;
  const double log_half_K = theta * theta * n / 2.0 - std::log(4.0);
  const double penalty = 4.0 * std::pow(static_cast<double>(n), 3) / eta;
  const double ratio = penalty * std::exp(-log_half_K);
  if (ratio >= 1.0) {
    if (log_x) *log_x = -std::numeric_limits<double>::infinity();
    return -std::numeric_limits<double>::infinity();
  }
  const double lx = log_half_K + std::log1p(-ratio);
  if (log_x) *log_x = lx;
  return lx - theta * theta * n / 4.0;
}

}  // namespace

bool lower_chain_passes(int n, double theta, double r) {
  check_lower(n, theta, r);
  return lower_margin(n, theta, r, nullptr) >= 0.0;
}

LowerChain lower_chain(int n, double theta, double r) {
  check_lower(n, theta, r);
  LowerChain out;
  out.n = n;
  out.theta = theta;
  out.r = r;
  out.eta = 1.0 / (r * theta) - 1.0;
  out.log_K = theta * theta * n / 2.0 - std::log(2.0);
  out.half_K = std::exp(out.log_K - std::log(2.0));
  out.penalty = 4.0 * std::pow(static_cast<double>(n), 3) / out.eta;
  out.log_target = theta * theta * n / 4.0;
  out.target = std::exp(out.log_target);
  double log_x = 0.0;
  out.passes = lower_margin(n, theta, r, &log_x) >= 0.0;
  if (std::isfinite(log_x)) {
    out.X_lower = LogLevelNumber::FromLogLog(log_x);
  } else {
    // K/2 - penalty <= 0: the bound on log|X| is vacuous.
    out.X_lower = LogLevelNumber::FromValue(1.0);
  }

  // Doubling, then bisection on the first passing n.
  int hi = 1;
  while (!lower_chain_passes(hi, theta, r)) {
    require(hi < (1 << 29), "lower_chain: no passing n below 2^30");
    hi *= 2;
  }
  int lo = hi / 2;
  if (hi == 1) {
    out.n0_hint = 1;
  } else {
    while (hi - lo > 1) {
      const int mid = lo + (hi - lo) / 2;
      if (lower_chain_passes(mid, theta, r)) hi = mid;
      else lo = mid;
    }
    out.n0_hint = hi;
  }
  return out;
}

LiminfConstants liminf_constant(double r) {
  require(r >= 1.0, "liminf_constant: r must be at least 1");
  LiminfConstants out;
  out.remark = 1.0 / (2.0 * r * r);
  const double theta = 1.0 / r;
  out.chain = theta * theta / 4.0;
  out.identity_residual = std::abs(theta * theta / 2.0 - out.remark);
  return out;
}

UpperChain upper_chain(int n, double eps) {
  require(n >= 1, "upper_chain: n must be positive");
  require(eps > 0.0 && eps < 1.0, "upper_chain: eps must lie in (0,1)");
  UpperChain out;
  out.n = n;
  out.eps = eps;
  const double log_base = n * std::log1p(2.0 / eps);
  if (log_base < std::log(9007199254740992.0)) {
    out.m = std::floor(std::pow(1.0 + 2.0 / eps, n) + 1e-9);
    out.log_m = std::log(out.m);
  } else {
    out.m = std::exp(log_base);
    out.log_m = log_base;
  }
  // log N <= n m log(3n/eps); log log N <= log n + log m + log log(3n/eps).
  const double loglog = std::log(static_cast<double>(n)) + out.log_m + std::log(std::log(3.0 * n / eps));
  out.log_N = LogLevelNumber::FromLog(loglog);
  out.N_bound = LogLevelNumber::FromLogLog(loglog);
  return out;
}

ClaimBound os_claim_counter(int n, double r, double delta) {
  require(n >= 1, "os_claim_counter: n must be positive");
  require(delta > 0.0 && delta < 1.0, "os_claim_counter: delta must lie in (0,1)");
  require(r >= 1.0, "os_claim_counter: r must be at least 1");
  require(r * (1.0 - delta) < 1.0, "os_claim_counter: need r (1 - delta) < 1 (1 + eta = 1/(r(1-delta)) must exceed 1)");
  ClaimBound out;
  out.eta = 1.0 / (r * (1.0 - delta)) - 1.0;
  out.log_bound = 2.0 * n * n * std::log1p(4.0 * n / out.eta);
  out.bound = LogLevelNumber::FromLog(out.log_bound);
  return out;
}

MeasureChain measure_chain(int n, int N, double delta, double c_assumed, double gamma) {
  require(n >= 1, "measure_chain: n must be positive");
  require(N >= 1, "measure_chain: N must be positive");
  require(c_assumed > 0.0, "measure_chain: the assumed constant must be positive");
  require(gamma > 0.0, "measure_chain: gamma must be positive");
  const EpsChain chain = eps_chain(delta);
  MeasureChain out;
  out.n = n;
  out.N = N;
  out.delta = delta;
  out.c_assumed = c_assumed;
  out.gamma = gamma;
  out.epsilon = chain.epsilon;
  out.epsilon_prime = chain.epsilon_prime;
  const double NN = static_cast<double>(N) * N;
  const double log_ratio = std::log(4.0 * gamma / chain.epsilon_prime);
  out.log_net_factor = 4.0 * NN * log_ratio;
  const double half = chain.epsilon_prime / 2.0;
  out.exponent = c_assumed * half * half * NN * n;
  out.log_bound = out.log_net_factor - out.exponent;
  out.bound = LogLevelNumber::FromLog(out.log_bound);
  out.c_delta = 0.5 * c_assumed * half * half;
  out.n_delta_hint = std::ceil(4.0 * log_ratio / out.c_delta);
  out.below_target = out.log_bound <= -out.c_delta * n * NN;
  return out;
}

HHIteration hh_iteration(int n, int N, double r) {
  require(n >= 1 && N >= 1, "hh_iteration: n and N must be positive");
  require(r >= 1.0, "hh_iteration: r must be at least 1");
  HHIteration out;
  out.r_input = r;
  const int e = std::max(1, static_cast<int>(std::lround(std::log2(r))));
  require(e <= 1000, "hh_iteration: r too large");
  out.k = e - 1;
  out.r = std::ldexp(1.0, e);
  out.rounded = out.r != r;
  const double NN = static_cast<double>(N) * N;
  out.log_bound = out.k * std::log(2.0) + 4.0 * n * NN * std::ldexp(1.0, -out.k);
  out.bound = LogLevelNumber::FromLog(out.log_bound);
  out.condition_holds = n >= r * std::log(r) / 4.0;
  out.log_headline = 8.0 * n * NN / std::ldexp(1.0, out.k);
  return out;
}

SphericalBound spherical_variant_bound(int n, double theta, double K_theta, double gamma) {
  require(n >= 1, "spherical_variant_bound: n must be positive");
  require(theta > 0.0 && theta < 1.0, "spherical_variant_bound: theta must lie in (0,1)");
  require(K_theta >= 2.0, "spherical_variant_bound: K_theta must be at least 2");
  require(gamma > 0.0, "spherical_variant_bound: gamma must be positive");
  SphericalBound out;
  out.gamma = gamma;
  out.threshold = 4.0 * n * static_cast<double>(n) / (theta * theta);
  out.log_bound = std::log(gamma) + K_theta * std::log(2.0) - 0.5 * std::log(K_theta) - out.threshold;
  out.bound = LogLevelNumber::FromLog(out.log_bound);
  out.significant = K_theta > out.threshold;
  return out;
}

}  // namespace bmlab
