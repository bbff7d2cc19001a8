#include <gtest/gtest.h>

#include <algorithm>

#include <cmath>
#include <numbers>

#include "otranks/geometry.hpp"
#include "otranks/types.hpp"

namespace otranks {
namespace {

TEST(Geometry, AreaCentroidExamples) {
  const auto sq = polygon_area_centroid(unit_square());
  EXPECT_DOUBLE_EQ(sq.area, 1.0);
  EXPECT_DOUBLE_EQ(sq.centroid.x, 0.5);
  EXPECT_DOUBLE_EQ(sq.centroid.y, 0.5);

  const Polygon tri{{0, 0}, {1, 0}, {0, 1}};
  const auto t = polygon_area_centroid(tri);
  EXPECT_DOUBLE_EQ(t.area, 0.5);
  EXPECT_NEAR(t.centroid.x, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.centroid.y, 1.0 / 3.0, 1e-15);

  const Polygon line{{0, 0}, {1, 1}, {2, 2}};
  EXPECT_EQ(polygon_area_centroid(line).area, 0.0);

  const Polygon two{{0, 0}, {1, 1}};
  EXPECT_THROW(polygon_area_centroid(two), InputError);
}

TEST(Geometry, ClipHalfplane) {
  // Keep x + y <= 1.
  const Polygon tri = clip_halfplane(unit_square(), -1.0, -1.0, 1.0);
  ASSERT_EQ(tri.size(), 3u);
  EXPECT_DOUBLE_EQ(polygon_area(tri), 0.5);
  // Fully outside and fully inside.
  EXPECT_TRUE(clip_halfplane(unit_square(), 1.0, 0.0, -2.0).empty());
  EXPECT_EQ(clip_halfplane(unit_square(), 1.0, 0.0, 1.0), unit_square());
  // A line through a corner keeps no duplicate vertices.
  const Polygon half = clip_halfplane(unit_square(), 1.0, -1.0, 0.0);
  EXPECT_EQ(half.size(), 3u);
}

TEST(Geometry, LabeledClipTracksEdges) {
  // Square edges labeled 0..3 counterclockwise from the bottom; cut off the corner (1,1).
  Polygon out;
  std::vector<int> labels;
  clip_halfplane_labeled(unit_square(), {0, 1, 2, 3}, -1.0, -1.0, 1.5, 7, out, labels);
  ASSERT_EQ(out, clip_halfplane(unit_square(), -1.0, -1.0, 1.5));
  ASSERT_EQ(labels.size(), out.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Point2 p = out[k], q = out[(k + 1) % out.size()];
    const Point2 m{0.5 * (p.x + q.x), 0.5 * (p.y + q.y)};
    int expected = -1;
    if (m.y == 0.0) expected = 0;
    else if (m.x == 1.0) expected = 1;
    else if (m.y == 1.0) expected = 2;
    else if (m.x == 0.0) expected = 3;
    else if (std::abs(m.x + m.y - 1.5) < 1e-15) expected = 7;
    EXPECT_EQ(labels[k], expected) << k;
  }
  // A cut through two corners.
  clip_halfplane_labeled(unit_square(), {0, 1, 2, 3}, 1.0, -1.0, 0.0, 9, out, labels);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(std::count(labels.begin(), labels.end(), 9), 1);
}

TEST(Geometry, IntersectConvexMatchesMonteCarlo) {
  RandomStream rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Polygon a = unit_square(), b = unit_square();
    for (int k = 0; k < 4; ++k) {
      const double th = rng.uniform(0, 2 * std::numbers::pi);
      a = clip_halfplane(a, std::cos(th), std::sin(th), rng.uniform(0.0, 0.6));
      const double ph = rng.uniform(0, 2 * std::numbers::pi);
      b = clip_halfplane(b, std::cos(ph), std::sin(ph), rng.uniform(0.0, 0.6));
    }
    if (a.empty() || b.empty()) continue;
    const Polygon c = intersect_convex(a, b);
    const double area = c.empty() ? 0.0 : polygon_area(c);
    const int n = 200000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      const Point2 p{rng.uniform(), rng.uniform()};
      if (polygon_contains(a, p, 0.0) && polygon_contains(b, p, 0.0)) ++hits;
    }
    const double est = static_cast<double>(hits) / n;
    const double se = std::sqrt(std::max(est * (1 - est), 1e-6) / n);
    EXPECT_NEAR(area, est, 4.0 * se + 1e-6);
  }
}

TEST(Geometry, SquaredDistanceIntegralMatchesQuadrature) {
  const Polygon poly{{0.1, 0.2}, {0.9, 0.1}, {0.8, 0.7}, {0.3, 0.9}};
  const Point2 p{0.4, -0.3};
  // Midpoint rule on a fine grid restricted to the polygon.
  const int g = 2000;
  double sum = 0.0;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const Point2 u{(i + 0.5) / g, (j + 0.5) / g};
      if (polygon_contains(poly, u, 0.0)) sum += (u.x - p.x) * (u.x - p.x) + (u.y - p.y) * (u.y - p.y);
    }
  }
  EXPECT_NEAR(integrate_squared_distance(poly, p), sum / (double(g) * g), 2e-4);
  // Unit square about its center: 2 * 1/12.
  EXPECT_NEAR(integrate_squared_distance(unit_square(), {0.5, 0.5}), 1.0 / 6.0, 1e-15);
}

TEST(Geometry, SampleInPolygon) {
  const Polygon tri{{0, 0}, {1, 0}, {0, 1}};
  RandomStream rng(9);
  double sx = 0.0, sy = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Point2 p = sample_in_polygon(tri, rng);
    ASSERT_TRUE(polygon_contains(tri, p));
    sx += p.x;
    sy += p.y;
  }
  EXPECT_NEAR(sx / n, 1.0 / 3.0, 0.01);
  EXPECT_NEAR(sy / n, 1.0 / 3.0, 0.01);
}

}  // namespace
}  // namespace otranks
