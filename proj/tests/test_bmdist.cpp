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
#include <numbers>

#include <gtest/gtest.h>

#include "bmlab/bmdist.hpp"
#include "bmlab/common.hpp"
#include "bmlab/rng.hpp"
#include "bmlab/signset.hpp"

namespace bmlab {
namespace {

const double kSqrt2 = std::numbers::sqrt2;

Eigen::Matrix2d rotation(double t) {
  Eigen::Matrix2d r;
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

// max ||u a||_F / ||a||_E over random directions: a lower estimate of ||u||.
double sampled_op_norm(const Eigen::MatrixXd& u, const PolytopalSpace& E, const PolytopalSpace& F, int samples,
                       std::uint64_t seed) {
  Rng rng(seed);
  double best = 0.0;
  for (int k = 0; k < samples; ++k) {
    Eigen::VectorXd a = gaussian_vector(E.dim(), rng);
    best = std::max(best, F.evaluate(u * a) / E.evaluate(a));
  }
  return best;
}

TEST(OperatorNorm, OneToInfinityAndBack) {
  for (int n : {2, 3, 4}) {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    EXPECT_NEAR(operator_norm(id, l1_space(n), linf_space(n)), 1.0, 1e-12);
    EXPECT_NEAR(operator_norm(id, linf_space(n), l1_space(n)), n, 1e-12);
    EXPECT_NEAR(operator_norm(id, l2_space(n), linf_space(n)), 1.0, 1e-12);
    EXPECT_NEAR(operator_norm(id, linf_space(n), l2_space(n)), std::sqrt(n), 1e-12);
  }
}

TEST(OperatorNorm, DominatesSampling) {
  Rng rng(11);
  SignSet T = greedy_sign_set(6, 0.5, SamplingMode::Exhaustive(), 0);
  PolytopalSpace E = make_Ex(T, {0, 1}), F = make_Ex(T, {2, 3});
  for (int k = 0; k < 10; ++k) {
    Eigen::VectorXd g = gaussian_vector(36, rng);
    Eigen::MatrixXd u = Eigen::Map<Eigen::MatrixXd>(g.data(), 6, 6);
    const double exact = operator_norm(u, E, F);
    const double sampled = sampled_op_norm(u, E, F, 20000, k);
    EXPECT_GE(exact, sampled - 1e-12);
    EXPECT_LE(exact, 1.5 * sampled);
  }
}

TEST(OperatorNorm, FromL1IsColumnMaximum) {
  Rng rng(12);
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd g = gaussian_vector(9, rng);
    Eigen::MatrixXd u = Eigen::Map<Eigen::MatrixXd>(g.data(), 3, 3);
    double oracle = 0.0;
    for (int j = 0; j < 3; ++j) oracle = std::max(oracle, u.col(j).norm());
    EXPECT_NEAR(op_norm_from_l1(u, l2_space(3)), oracle, 1e-12);
    EXPECT_NEAR(op_norm_from_l1(u, l2_space(3)), operator_norm(u, l1_space(3), l2_space(3)), 1e-10);
  }
}

TEST(OperatorNorm, SandwichBrackets) {
  SignSet T = greedy_sign_set(6, 0.5, SamplingMode::Exhaustive(), 0);
  PolytopalSpace E = make_Ex(T, {0, 3});
  Rng rng(13);
  Eigen::VectorXd g = gaussian_vector(36, rng);
  Eigen::MatrixXd u = Eigen::Map<Eigen::MatrixXd>(g.data(), 6, 6);
  auto [lo, hi] = op_norm_sandwich(u, E, l2_space(6));
  const double exact = operator_norm(u, E, l2_space(6));
  EXPECT_LE(lo, exact + 1e-12);
  EXPECT_GE(hi, exact - 1e-12);
}

TEST(MapDistortion, RotatedCrossPolytopeIsCube) {
  // (1,1),(1,-1) maps l1^2 isometrically onto l_inf^2.
  Eigen::Matrix2d u;
  u << 1, 1, 1, -1;
  EXPECT_NEAR(map_distortion(u, l1_space(2), linf_space(2)), 1.0, 1e-12);
  EXPECT_NEAR(map_distortion(Eigen::Matrix2d::Identity(), l1_space(2), linf_space(2)), 2.0, 1e-12);
  EXPECT_TRUE(std::isinf(map_distortion(Eigen::Matrix2d::Zero(), l1_space(2), linf_space(2))));
}

TEST(MapDistortion, InvariantUnderScaling) {
  Eigen::Matrix2d u = rotation(0.3) * 1.7;
  EXPECT_NEAR(map_distortion(u, l2_space(2), linf_space(2)), map_distortion(u / 5.0, l2_space(2), linf_space(2)), 1e-12);
}

TEST(MakeMap, InverseAndNorm) {
  Eigen::Matrix2d u;
  u << 2, 1, 0, 1;
  LinearMapBetween m = make_map(u, l1_space(2), l2_space(2));
  EXPECT_LE(m.inverse_residual, 1e-12);
  // Largest column norm: |(2,0)| = 2 against |(1,1)| = sqrt 2.
  EXPECT_NEAR(m.op_norm_upper, 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(m.op_norm_lower, m.op_norm_upper);
}

TEST(IdentityCertificate, RatioAtLeastInverseTheta) {
  SignSet T = drop_to_even(greedy_sign_set(12, 0.5, SamplingMode::Exhaustive(), 0));
  Antichain a = antichain_half_subsets(static_cast<int>(T.size()), SamplingMode::Sampled(8), 1);
  for (const auto& x : a.subsets) {
    for (const auto& y : a.subsets) {
      if (x == y) continue;
      Certificate c = identity_certificate(x, y, T);
      EXPECT_EQ(c.kind, Certificate::Kind::IdentityWitness);
      EXPECT_EQ(to_string(c.kind), "identity-witness");
      EXPECT_DOUBLE_EQ(c.source_norm, 12.0);
      EXPECT_LE(c.target_norm, 6.0);
      EXPECT_GE(c.implied_ratio, 2.0);
      // Direct re-evaluation with independently built spaces.
      EXPECT_DOUBLE_EQ(make_Ex(T, x).evaluate(c.witness), c.source_norm);
      EXPECT_DOUBLE_EQ(make_Ex(T, y).evaluate(c.witness), c.target_norm);
      EXPECT_TRUE(recheck_certificate(c, make_Ex(T, x), make_Ex(T, y)));
      // The operator norm dominates the certificate.
      EXPECT_GE(operator_norm(Eigen::MatrixXd::Identity(12, 12), make_Ex(T, y), make_Ex(T, x)), c.implied_ratio - 1e-9);
    }
  }
}

TEST(IdentityCertificate, TamperedNormFailsRecheck) {
  SignSet T = drop_to_even(greedy_sign_set(8, 0.5, SamplingMode::Exhaustive(), 0));
  Certificate c = identity_certificate({0, 1}, {2, 3}, T);
  c.target_norm *= 1.1;
  EXPECT_FALSE(recheck_certificate(c, make_Ex(T, {0, 1}), make_Ex(T, {2, 3})));
}

TEST(MapWitness, LowerBoundsOperatorNorm) {
  Eigen::Matrix2d u = rotation(0.4);
  Rng rng(14);
  for (int k = 0; k < 20; ++k) {
    Certificate c = map_witness(u, l1_space(2), linf_space(2), gaussian_vector(2, rng));
    EXPECT_LE(c.implied_ratio, operator_norm(u, l1_space(2), linf_space(2)) + 1e-12);
  }
}

TEST(John, CubeAndCrossPolytopeFactors) {
  JohnEllipsoid cube = john_ellipsoid(linf_space(2));
  EXPECT_NEAR(cube.inner_radius_factor, 1.0, 1e-6);
  EXPECT_NEAR(cube.outer_radius_factor, kSqrt2, 1e-6);
  JohnEllipsoid cross = john_ellipsoid(l1_space(2));
  EXPECT_NEAR(cross.inner_radius_factor, 1.0, 1e-6);
  EXPECT_NEAR(cross.outer_radius_factor, kSqrt2, 1e-6);
  JohnEllipsoid disk = john_ellipsoid(l2_space(2));
  EXPECT_NEAR(disk.outer_radius_factor, 1.0, 1e-9);
  // John's theorem: B is inside sqrt(n) E.
  for (int n : {3, 4}) EXPECT_LE(john_ellipsoid(linf_space(n)).outer_radius_factor, std::sqrt(n) + 1e-6);
}

TEST(Exact2d, ClassicalPairs) {
  Exact2dResult a = bm_exact_2d(l1_space(2), linf_space(2));
  EXPECT_TRUE(a.certified);
  EXPECT_NEAR(a.value, 1.0, 1e-3);
  Exact2dResult b = bm_exact_2d(l2_space(2), linf_space(2));
  EXPECT_TRUE(b.certified);
  EXPECT_NEAR(b.value, kSqrt2, 1e-3);
  EXPECT_LE(b.lower, kSqrt2 + 1e-9);
  EXPECT_GE(b.value, kSqrt2 - 1e-9);
  // The map it reports achieves the value.
  EXPECT_NEAR(map_distortion(b.map, l2_space(2), linf_space(2)), b.value, 1e-9);
}

TEST(Exact2d, SymmetricAndIdentity) {
  Exact2dResult ab = bm_exact_2d(l2_space(2), l1_space(2));
  Exact2dResult ba = bm_exact_2d(l1_space(2), l2_space(2));
  EXPECT_NEAR(ab.value, ba.value, 1e-3);
  Exact2dResult self = bm_exact_2d(linf_space(2), linf_space(2));
  EXPECT_NEAR(self.value, 1.0, 1e-3);
}

TEST(Exact2d, RejectsHigherDimension) {
  EXPECT_THROW(bm_exact_2d(l1_space(3), linf_space(3)), PreconditionError);
}

TEST(Upper, JohnRouteAndBounds) {
  UpperBound u = bm_upper(l2_space(2), linf_space(2));
  EXPECT_LE(u.value, kSqrt2 + 1e-3);
  EXPECT_GE(u.value, kSqrt2 - 1e-9);
  EXPECT_NEAR(map_distortion(u.map, l2_space(2), linf_space(2)), u.value, 1e-9);
  UpperBound v = bm_upper(l1_space(2), linf_space(2));
  EXPECT_NEAR(v.value, 1.0, 1e-6);
}

TEST(Upper, DeterministicUnderSeed) {
  UpperBoundOptions o;
  o.effort = 4;
  o.seed = 5;
  SignSet T = greedy_sign_set(4, 0.5, SamplingMode::Exhaustive(), 0);
  UpperBound a = bm_upper(make_Ex(T, {0}), make_Ex(T, {1}), o);
  UpperBound b = bm_upper(make_Ex(T, {0}), make_Ex(T, {1}), o);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.map, b.map);
}

TEST(WitnessLowerBound, BelowDistortion) {
  Eigen::Matrix2d u = rotation(0.2) * Eigen::Vector2d(1.0, 0.5).asDiagonal();
  EXPECT_LE(witness_lower_bound(u, l1_space(2), l2_space(2)), map_distortion(u, l1_space(2), l2_space(2)) + 1e-12);
}

TEST(Packing, EveryAcceptedPairCertified) {
  SignSet T = drop_to_even(greedy_sign_set(10, 0.5, SamplingMode::Exhaustive(), 0));
  Antichain a = antichain_half_subsets(static_cast<int>(T.size()), SamplingMode::Sampled(10), 2);
  PackingResult p = greedy_packing_Ex(T, a.subsets, 1.5, 0, 3);
  EXPECT_TRUE(p.acceptance_heuristic);
  const std::size_t k = p.accepted.size();
  EXPECT_EQ(p.pairs.size(), k * (k - 1) / 2);
  EXPECT_EQ(k + p.rejected.size(), a.size());
  for (const auto& pair : p.pairs) EXPECT_GE(pair.certificate.implied_ratio, 2.0);
}

TEST(Packing, RejectsDuplicates) {
  std::vector<PolytopalSpace> family = {l1_space(2), linf_space(2), l2_space(2)};
  PackingResult p = greedy_packing(family, 1.2, 8, 0);
  // l_inf^2 is isometric to l1^2, so it is rejected with an explicit map.
  ASSERT_EQ(p.rejected.size(), 1u);
  EXPECT_EQ(p.rejected[0].index, 1);
  EXPECT_LT(p.rejected[0].distance_upper, 1.2);
}

TEST(Claim, ClosedForm) {
  ClaimCount c = claim_counter(16, 1.5, 0.5);
  const double eta = 1.0 / 0.75 - 1.0;
  EXPECT_NEAR(c.eta, eta, 1e-15);
  EXPECT_NEAR(c.bound.log_value(), 256.0 * std::log1p(64.0 / eta), 1e-9);
  EXPECT_THROW(claim_counter(16, 2.0, 0.5), PreconditionError);
}

}  // namespace
}  // namespace bmlab
