#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "otranks/reference_measure.hpp"
#include "otranks/stats.hpp"

namespace otranks {
namespace {

TEST(ReferenceMeasure, CubeSampleIsDeterministic) {
  const auto cube = ReferenceMeasure::cube(2);
  RandomStream a(7), b(7);
  const PointSet p = cube.sample(3, a);
  const PointSet q = cube.sample(3, b);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p, q);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (double v : p[i]) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(ReferenceMeasure, BallMeanNearOrigin) {
  const auto ball = ReferenceMeasure::ball(3);
  RandomStream rng(11);
  const PointSet p = ball.sample(10000, rng);
  for (std::size_t j = 0; j < 3; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i][j];
    EXPECT_NEAR(s / 10000.0, 0.0, 0.05);
  }
}

TEST(ReferenceMeasure, BallRadiusLaw) {
  // Uniform in the ball: P(|U| <= t) = t^d, so |U|^d is uniform.
  const auto ball = ReferenceMeasure::ball(3);
  RandomStream rng(12);
  const PointSet p = ball.sample(5000, rng);
  std::vector<double> v;
  for (std::size_t i = 0; i < p.size(); ++i) v.push_back(std::pow(std::sqrt(dot(p[i], p[i])), 3.0));
  EXPECT_GT(ks_uniform(v).p_value, 0.001);
}

TEST(ReferenceMeasure, SphericalRadiiUniform) {
  const auto sph = ReferenceMeasure::spherical(2);
  RandomStream rng(13);
  const PointSet p = sph.sample(10000, rng);
  std::vector<double> radii, angles;
  for (std::size_t i = 0; i < p.size(); ++i) {
    radii.push_back(std::sqrt(dot(p[i], p[i])));
    angles.push_back((std::atan2(p[i][1], p[i][0]) + std::numbers::pi) / (2.0 * std::numbers::pi));
  }
  EXPECT_GT(ks_uniform(radii).p_value, 0.001);
  EXPECT_GT(ks_uniform(angles).p_value, 0.001);
}

TEST(ReferenceMeasure, Contains) {
  const auto cube = ReferenceMeasure::cube(2);
  const auto ball = ReferenceMeasure::ball(2);
  EXPECT_TRUE(cube.contains(Vector{0.5, 0.5}));
  EXPECT_TRUE(cube.contains(Vector{1.0, 1.0}));
  EXPECT_FALSE(cube.contains(Vector{1.0, 1.0000001}));
  EXPECT_FALSE(cube.contains(Vector{-1e-12, 0.5}));
  EXPECT_FALSE(ball.contains(Vector{0.8, 0.8}));
  EXPECT_TRUE(ball.contains(Vector{0.6, 0.8}));
  EXPECT_THROW(cube.contains(Vector{0.5}), DimensionMismatch);
}

TEST(ReferenceMeasure, SamplesAreContained) {
  for (auto kind : {ReferenceKind::unit_cube, ReferenceKind::unit_ball, ReferenceKind::spherical_uniform}) {
    for (std::size_t d : {1u, 2u, 3u, 5u}) {
      const ReferenceMeasure m(kind, d);
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        RandomStream rng(seed);
        const PointSet p = m.sample(500, rng);
        for (std::size_t i = 0; i < p.size(); ++i) ASSERT_TRUE(m.contains(p[i]));
      }
    }
  }
}

TEST(ReferenceMeasure, SupportHalfspaces) {
  const auto h1 = ReferenceMeasure::cube(1).support_halfspaces();
  ASSERT_TRUE(h1.has_value());
  ASSERT_EQ(h1->size(), 2u);
  const auto h2 = ReferenceMeasure::cube(2).support_halfspaces();
  ASSERT_TRUE(h2.has_value());
  EXPECT_EQ(h2->size(), 4u);
  EXPECT_FALSE(ReferenceMeasure::ball(2).support_halfspaces().has_value());
  EXPECT_FALSE(ReferenceMeasure::spherical(2).support_halfspaces().has_value());
}

TEST(ReferenceMeasure, CubeSlabWidthsMultiplyToOne) {
  for (std::size_t d = 1; d <= 4; ++d) {
    const auto hs = *ReferenceMeasure::cube(d).support_halfspaces();
    ASSERT_EQ(hs.size(), 2 * d);
    double volume = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      double lo = 0.0, hi = 0.0;
      for (const auto& h : hs) {
        if (h.normal[j] == 0.0) continue;
        for (std::size_t k = 0; k < d; ++k) {
          if (k != j) ASSERT_EQ(h.normal[k], 0.0);
        }
        if (h.normal[j] > 0) hi = h.offset / h.normal[j];
        if (h.normal[j] < 0) lo = h.offset / h.normal[j];
      }
      volume *= hi - lo;
    }
    EXPECT_DOUBLE_EQ(volume, 1.0);
  }
}

TEST(ReferenceMeasure, RejectsZeroDimension) { EXPECT_THROW(ReferenceMeasure::cube(0), InputError); }

TEST(ReferenceMeasure, ProjectAndNames) {
  const auto cube = ReferenceMeasure::cube(2);
  Vector p{1.5, -0.5};
  cube.project(p);
  EXPECT_EQ(p, (Vector{1.0, 0.0}));
  const auto ball = ReferenceMeasure::ball(2);
  Vector q{3.0, 4.0};
  ball.project(q);
  EXPECT_NEAR(q[0], 0.6, 1e-15);
  EXPECT_NEAR(q[1], 0.8, 1e-15);
  EXPECT_EQ(ReferenceMeasure::parse_kind("cube"), ReferenceKind::unit_cube);
  EXPECT_EQ(ReferenceMeasure::parse_kind(ball.name()), ReferenceKind::unit_ball);
  EXPECT_THROW(ReferenceMeasure::parse_kind("torus"), InputError);
}

}  // namespace
}  // namespace otranks
