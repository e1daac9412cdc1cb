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

#include <cmath>

#include <gtest/gtest.h>

#include "bmlab/bmdist.hpp"
#include "bmlab/bounds.hpp"
#include "bmlab/common.hpp"
#include "bmlab/loglevel.hpp"
#include "bmlab/qexpander.hpp"

namespace bmlab {
namespace {

TEST(LogLevel, PromotionAndRoundTrip) {
  LogLevelNumber small = LogLevelNumber::FromValue(42.0);
  EXPECT_EQ(small.level(), 0);
  EXPECT_DOUBLE_EQ(small.to_double(), 42.0);
  LogLevelNumber big = LogLevelNumber::FromValue(1e6);
  EXPECT_EQ(big.level(), 1);
  EXPECT_NEAR(big.value(), std::log(1e6), 1e-12);
  EXPECT_NEAR(big.to_double(), 1e6, 1e-6);
  LogLevelNumber huge = LogLevelNumber::FromLog(1e4);
  EXPECT_EQ(huge.level(), 2);
  EXPECT_NEAR(huge.log_value(), 1e4, 1e-9);
  EXPECT_TRUE(std::isinf(huge.to_double()));
  // No demotion.
  EXPECT_EQ(LogLevelNumber::FromLog(2.0).level(), 1);
}

TEST(LogLevel, ComparisonAgreesWithDoubles) {
  const double xs[] = {0.0, 0.5, 1.0, 3.0, 499.0, 501.0, 1e10, 1e200};
  for (double a : xs) {
    for (double b : xs) {
      LogLevelNumber A = LogLevelNumber::FromValue(a), B = LogLevelNumber::FromValue(b);
      EXPECT_EQ(A < B, a < b) << a << " " << b;
      EXPECT_EQ(A == B, a == b) << a << " " << b;
    }
  }
}

TEST(LogLevel, CrossLevelComparison) {
  EXPECT_LT(LogLevelNumber::FromValue(400.0), LogLevelNumber::FromLog(6.0));  // e^6 ~ 403
  EXPECT_GT(LogLevelNumber::FromValue(410.0), LogLevelNumber::FromLog(6.0));
  EXPECT_LT(LogLevelNumber::FromLog(700.0), LogLevelNumber::FromLogLog(7.0));  // e^7 ~ 1097
  EXPECT_LT(LogLevelNumber::FromValue(-5.0), LogLevelNumber::FromLog(-100.0));
}

TEST(LogLevel, ProductAndPower) {
  LogLevelNumber a = LogLevelNumber::FromLog(300.0), b = LogLevelNumber::FromLog(400.0);
  EXPECT_NEAR((a * b).log_value(), 700.0, 1e-9);
  EXPECT_NEAR(a.pow(3.0).log_value(), 900.0, 1e-9);
  EXPECT_NEAR((LogLevelNumber::FromValue(3.0) * LogLevelNumber::FromValue(4.0)).to_double(), 12.0, 1e-12);
  EXPECT_NEAR(LogLevelNumber::FromValue(2.0).pow(10).to_double(), 1024.0, 1e-9);
}

TEST(LowerChain, ReferenceValues) {
  LowerChain c = lower_chain(400, 0.5, 1.9);
  // Direct evaluation of each link.
  const double K = std::exp(0.25 * 400 / 2.0) / 2.0;
  const double eta = 1.0 / 0.95 - 1.0;
  EXPECT_NEAR(c.half_K / (K / 2.0), 1.0, 1e-12);
  EXPECT_NEAR(c.half_K, 1.30e21, 0.01e21);
  EXPECT_NEAR(c.penalty, 4.0 * 400.0 * 400.0 * 400.0 / eta, 1e-3);
  EXPECT_NEAR(c.penalty, 4.87e9, 0.01e9);
  EXPECT_NEAR(c.target, std::exp(25.0), 1e-3);
  EXPECT_NEAR(c.target, 7.2e10, 0.01e10);
  EXPECT_TRUE(c.passes);
  EXPECT_EQ(c.passes, K / 2.0 - c.penalty >= c.target);
  EXPECT_NEAR(c.X_lower.loglog_value(), std::log(K / 2.0 - c.penalty), 1e-9);
}

TEST(LowerChain, ThresholdIsMonotone) {
  LowerChain c = lower_chain(400, 0.5, 1.9);
  EXPECT_TRUE(lower_chain_passes(c.n0_hint, 0.5, 1.9));
  EXPECT_FALSE(lower_chain_passes(c.n0_hint - 1, 0.5, 1.9));
  EXPECT_FALSE(lower_chain(50, 0.5, 1.9).passes);
  EXPECT_THROW(lower_chain(400, 0.5, 2.0), PreconditionError);
}

TEST(Liminf, AlgebraicIdentity) {
  for (double r : {1.0, 1.5, 2.0, 7.0}) {
    LiminfConstants c = liminf_constant(r);
    EXPECT_DOUBLE_EQ(c.remark, 1.0 / (2.0 * r * r));
    EXPECT_DOUBLE_EQ(c.chain, 1.0 / (4.0 * r * r));
    EXPECT_LE(c.identity_residual, 1e-15);
  }
}

TEST(UpperChain, ReferenceValues) {
  UpperChain c = upper_chain(10, 0.5);
  EXPECT_DOUBLE_EQ(c.m, 9765625.0);
  const double logN = 10.0 * 9765625.0 * std::log(60.0);
  EXPECT_NEAR(c.log_N.to_double(), logN, 1e-6 * logN);
  EXPECT_NEAR(logN, 4.00e8, 0.01e8);
  EXPECT_NEAR(c.N_bound.log_value(), logN, 1e-6 * logN);
}

TEST(Claims, OperatorSpaceIsSquareOfScalar) {
  ClaimCount scalar = claim_counter(16, 1.5, 0.5);
  ClaimBound os = os_claim_counter(16, 1.5, 0.5);
  EXPECT_NEAR(os.log_bound, 2.0 * scalar.bound.log_value(), 1e-9);
  const double eta = 1.0 / (1.5 * 0.5) - 1.0;
  EXPECT_NEAR(os.log_bound, 2.0 * 256.0 * std::log(1.0 + 64.0 / eta), 1e-9);
}

TEST(Measure, Formula) {
  MeasureChain m = measure_chain(1000, 4, 0.4, 0.5, 6.0);
  EpsChain e = eps_chain(0.4);
  const double half = e.epsilon_prime / 2.0;
  EXPECT_NEAR(m.log_bound, 64.0 * std::log(24.0 / e.epsilon_prime) - 0.5 * half * half * 16.0 * 1000.0, 1e-9);
  EXPECT_FALSE(m.below_target);
  MeasureChain big = measure_chain(static_cast<int>(m.n_delta_hint) * 2, 4, 0.4, 0.5, 6.0);
  EXPECT_TRUE(big.below_target);
}

TEST(HH, BaseCaseAndRounding) {
  HHIteration h = hh_iteration(32, 2, 2.0);
  EXPECT_EQ(h.k, 0);
  EXPECT_DOUBLE_EQ(h.log_bound, 4.0 * 32 * 4);
  HHIteration g = hh_iteration(32, 2, 8.0);
  EXPECT_EQ(g.k, 2);
  EXPECT_NEAR(g.log_bound, 2.0 * std::log(2.0) + 4.0 * 32 * 4 / 4.0, 1e-12);
  EXPECT_DOUBLE_EQ(g.log_headline, 8.0 * 32 * 4 / 4.0);
  EXPECT_TRUE(g.condition_holds);
  HHIteration r = hh_iteration(32, 2, 6.0);
  EXPECT_TRUE(r.rounded);
  EXPECT_DOUBLE_EQ(r.r, 8.0);
}

TEST(Spherical, Formula) {
  SphericalBound s = spherical_variant_bound(10, 0.5, 1e4);
  const double gamma = std::sqrt(2.0 / M_PI);
  EXPECT_NEAR(s.log_bound, std::log(gamma) + 1e4 * std::log(2.0) - 0.5 * std::log(1e4) - 1600.0, 1e-9);
  EXPECT_TRUE(s.significant);
  EXPECT_FALSE(spherical_variant_bound(10, 0.5, 100).significant);
}

}  // namespace
}  // namespace bmlab
