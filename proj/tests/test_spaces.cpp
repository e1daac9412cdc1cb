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

#include "bmlab/common.hpp"
#include "bmlab/rng.hpp"
#include "bmlab/signset.hpp"
#include "bmlab/spaces.hpp"

namespace bmlab {
namespace {

TEST(Norms, ClassicalSpacesMatchFormulas) {
  Rng rng(1);
  for (int n : {1, 2, 3, 5}) {
    PolytopalSpace l1 = l1_space(n), l2 = l2_space(n), li = linf_space(n);
    for (int k = 0; k < 200; ++k) {
      Eigen::VectorXd a = gaussian_vector(n, rng);
      EXPECT_NEAR(l1.evaluate(a), a.cwiseAbs().sum(), 1e-12);
      EXPECT_NEAR(l2.evaluate(a), a.norm(), 1e-12);
      EXPECT_NEAR(li.evaluate(a), a.cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Norms, HomogeneousAndTriangle) {
  Rng rng(2);
  SignSet T = greedy_sign_set(8, 0.5, SamplingMode::Exhaustive(), 0);
  PolytopalSpace E = make_Ex(T, {0, 2, 3});
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd a = gaussian_vector(8, rng), b = gaussian_vector(8, rng);
    const double c = gaussian_vector(1, rng)(0);
    EXPECT_NEAR(E.evaluate(c * a), std::abs(c) * E.evaluate(a), 1e-12);
    EXPECT_LE(E.evaluate(a + b), E.evaluate(a) + E.evaluate(b) + 1e-12);
  }
}

TEST(MakeEx, MatchesDirectFormula) {
  SignSet T = greedy_sign_set(10, 0.5, SamplingMode::Exhaustive(), 0);
  const std::vector<int> x = {1, 4, 5, 7};
  PolytopalSpace E = make_Ex(T, x);
  EXPECT_TRUE(satisfies_unit_sandwich(E));
  Rng rng(3);
  for (int k = 0; k < 500; ++k) {
    Eigen::VectorXd a = gaussian_vector(10, rng);
    double direct = a.cwiseAbs().maxCoeff();
    for (int t : x) direct = std::max(direct, std::abs(a.dot(T.vectors.row(t).transpose().cast<double>())));
    EXPECT_NEAR(E.evaluate(a), direct, 1e-12);
  }
  // Members of x are norm n; the sandwich keeps everything else at most n.
  for (int t : x) EXPECT_DOUBLE_EQ(E.evaluate(T.vectors.row(t).transpose().cast<double>()), 10.0);
}

TEST(MakeEx, RejectsBadSubsets) {
  SignSet T = greedy_sign_set(6, 0.5, SamplingMode::Exhaustive(), 0);
  EXPECT_THROW(make_Ex(T, {0, 0}), PreconditionError);
  EXPECT_THROW(make_Ex(T, {static_cast<int>(T.size())}), PreconditionError);
}

TEST(Vertices, CubeAndCrossPolytope) {
  // One vertex per +- pair.
  EXPECT_EQ(linf_space(3).vertices().rows(), 4);
  EXPECT_EQ(l1_space(3).vertices().rows(), 3);
  const Eigen::MatrixXd v = linf_space(2).vertices();
  for (Eigen::Index i = 0; i < v.rows(); ++i) EXPECT_NEAR(v.row(i).cwiseAbs().minCoeff(), 1.0, 1e-12);
}

TEST(Support, EqualsDualNorm) {
  Rng rng(4);
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd g = gaussian_vector(3, rng);
    EXPECT_NEAR(support(linf_space(3), g).value, g.cwiseAbs().sum(), 1e-10);
    EXPECT_NEAR(support(l1_space(3), g).value, g.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(support(l2_space(3), g).value, g.norm(), 1e-10);
    EXPECT_NEAR(dual_norm(linf_space(3), g), g.cwiseAbs().sum(), 1e-10);
    Support s = support(linf_space(3), g);
    EXPECT_NEAR(linf_space(3).evaluate(s.argmax), 1.0, 1e-10);
    EXPECT_NEAR(g.dot(s.argmax), s.value, 1e-10);
  }
}

TEST(Support, SimplexRouteBeyondVertexGuard) {
  // Dimension 8 is past the enumeration guard; compare with |g|_1 for the cube.
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd g = gaussian_vector(8, rng);
    EXPECT_NEAR(support(linf_space(8), g).value, g.cwiseAbs().sum(), 1e-9);
  }
}

TEST(DualSpace, PolarOfCubeIsCrossPolytope) {
  PolytopalSpace d = dual_space(linf_space(2));
  Rng rng(6);
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd a = gaussian_vector(2, rng);
    EXPECT_NEAR(d.evaluate(a), a.cwiseAbs().sum(), 1e-10);
  }
}

TEST(Auerbach, BiorthogonalUnitBasis) {
  for (const PolytopalSpace& E : {l1_space(3), l2_space(3), linf_space(2)}) {
    AuerbachBasis ab = auerbach_basis(E, 7);
    EXPECT_TRUE(ab.converged);
    EXPECT_LE(ab.biorthogonality_residual, 1e-9);
    for (int j = 0; j < E.dim(); ++j) {
      EXPECT_NEAR(E.evaluate(ab.basis.col(j)), 1.0, 1e-9);
      EXPECT_NEAR(dual_norm(E, ab.dual.row(j).transpose()), 1.0, 1e-6);
    }
  }
}

TEST(BallNet, SeparatedCoveringAndCounted) {
  for (const PolytopalSpace& E : {l2_space(2), l1_space(2), linf_space(2)}) {
    const double xi = 0.3;
    BallNet net = ball_net(E, xi, 1);
    EXPECT_LE(static_cast<double>(net.size()), net.cardinality_bound);
    EXPECT_TRUE(net.points.row(0).isZero());
    for (Eigen::Index i = 0; i < net.size(); ++i) {
      EXPECT_LE(E.evaluate(net.points.row(i).transpose()), 1.0 + 1e-12);
      for (Eigen::Index j = 0; j < i; ++j) {
        EXPECT_GE(E.evaluate((net.points.row(i) - net.points.row(j)).transpose()), xi - 1e-9);
      }
    }
    EXPECT_LE(grid_covering_radius(net, 0.01), xi + 1e-9);
    EXPECT_LE(sampled_covering_radius(net, 2000, 2), xi + 1e-9);
  }
}

TEST(BallNet, GuardRejectsHugeNets) {
  EXPECT_THROW(ball_net(l2_space(6), 0.01), ResourceGuardError);
}

TEST(EmbedLinf, EuclideanPlane) {
  LinfEmbedding e = embed_linf(l2_space(2), 0.5, 0);
  EXPECT_LE(e.m, 25);
  EXPECT_DOUBLE_EQ(e.m_bound, 25.0);
  DistortionSample d = sample_distortion(l2_space(2), e.image, 10000, 1);
  EXPECT_LE(d.distortion, 2.0 + 1e-9);
  EXPECT_GE(d.distortion, 1.0 - 1e-12);
}

TEST(EmbedLinf, ImageNormIsBelowSource) {
  // Dual net points have dual norm <= 1, so ||x||_F <= ||x||_E.
  LinfEmbedding e = embed_linf(l1_space(3), 0.4, 0);
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd a = gaussian_vector(3, rng);
    EXPECT_LE(e.image.evaluate(a), l1_space(3).evaluate(a) + 1e-12);
    EXPECT_GE(e.image.evaluate(a), (1.0 - 0.4) * l1_space(3).evaluate(a) - 1e-12);
  }
}

TEST(SubspaceNet, CountsAgainstBound) {
  SubspaceNet net = subspace_net(2, linf_space(3), 0.2, 0);
  EXPECT_NEAR(net.radius, 1.4 / 0.6, 1e-12);
  EXPECT_LE(net.tuple_count, net.cardinality_bound);
  EXPECT_DOUBLE_EQ(net.tuple_count, std::pow(static_cast<double>(net.ball.size()), 2));
}

TEST(SubspaceNet, SmallEnumeratedMembersAreNorms) {
  SubspaceNet net = subspace_net(1, linf_space(2), 0.5, 0);
  ASSERT_TRUE(net.enumerated);
  EXPECT_EQ(net.tuples.size(), net.spaces.size());
  // Only the origin is degenerate in dimension 1.
  EXPECT_EQ(net.degenerate, 1);
}

TEST(SubspaceNet, RandomSubspaceIsClose) {
  SubspaceNet net = subspace_net(2, linf_space(3), 0.2, 0);
  Eigen::MatrixXd basis(3, 2);
  basis << 1.0, 0.2, -0.3, 1.0, 0.5, 0.7;
  SubspaceNetCheck c = verify_subspace_net(net, basis, 5000, 3);
  EXPECT_TRUE(c.within_factors);
  EXPECT_TRUE(c.within_radius);
  EXPECT_LE(c.snap_distance, 0.2 + 1e-12);
}

TEST(SubspaceNet, RejectsLargeXi) {
  EXPECT_THROW(subspace_net(2, linf_space(3), 0.5), PreconditionError);
}

TEST(RestrictTo, CoordinatePlaneOfCube) {
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(3, 2);
  basis(0, 0) = 1.0;
  basis(2, 1) = 1.0;
  PolytopalSpace r = restrict_to(linf_space(3), basis);
  Rng rng(9);
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd c = gaussian_vector(2, rng);
    EXPECT_NEAR(r.evaluate(c), c.cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LocalSpace, SignSystemOverEuclidean) {
  SignSet T = greedy_sign_set(8, 0.5, SamplingMode::Exhaustive(), 0);
  auto system = sign_system(T);
  EXPECT_NO_THROW(validate_system(l2_space(8), system, 0.5, 1.0));
  EXPECT_THROW(validate_system(l2_space(8), system, 0.1, 1.0), PreconditionError);
  LocalSpace loc = make_lemloc_space(l2_space(8), system, 0.5, 1.0, {0, 1, 2});
  EXPECT_DOUBLE_EQ(loc.distance_bound, 2.0);
  Rng rng(10);
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd a = gaussian_vector(8, rng);
    const double e = a.norm();
    EXPECT_GE(loc.space.evaluate(a), loc.lower_factor * e - 1e-12);
    EXPECT_LE(loc.space.evaluate(a), loc.upper_factor * e + 1e-12);
  }
}

}  // namespace
}  // namespace bmlab
