#include <gtest/gtest.h>

#include <numbers>

#include "flatgrasp/geometry.hpp"
#include "flatgrasp/rng.hpp"
#include "oracles.hpp"

namespace flatgrasp {
namespace {

using testing::fan_centroid;
using testing::trapezoid_area;
using testing::winding_contains;

const Polygon kUnitSquare{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
const Polygon kLShape{{0, 0}, {3, 0}, {3, 1}, {1, 1}, {1, 3}, {0, 3}};

TEST(Geometry, ShoelaceAreaMatchesTrapezoidSum) {
  EXPECT_DOUBLE_EQ(signed_area(kUnitSquare), 1.0);
  EXPECT_DOUBLE_EQ(signed_area(kLShape), 5.0);
  const Polygon cw(kLShape.rbegin(), kLShape.rend());
  EXPECT_DOUBLE_EQ(signed_area(cw), -5.0);
  const Polygon tri{{0, 0}, {4, 0}, {1, 3}};
  EXPECT_DOUBLE_EQ(signed_area(tri), trapezoid_area(tri));
  EXPECT_DOUBLE_EQ(signed_area(tri), 6.0);
}

TEST(Geometry, CentroidOfLShapeLiesOffTheMaterialCorner) {
  // Two rectangles: [0,3]x[0,1] (area 3, centre (1.5, 0.5)) and [0,1]x[1,3] (area 2, centre (0.5, 2)).
  const Vec2 expected{(3 * 1.5 + 2 * 0.5) / 5.0, (3 * 0.5 + 2 * 2.0) / 5.0};
  const Vec2 c = area_centroid(kLShape);
  EXPECT_NEAR(c.x, expected.x, 1e-12);
  EXPECT_NEAR(c.y, expected.y, 1e-12);
  const Vec2 f = fan_centroid(kLShape);
  EXPECT_NEAR(c.x, f.x, 1e-12);
  EXPECT_NEAR(c.y, f.y, 1e-12);
}

TEST(Geometry, DegenerateCentroidFallsBackToVertexMean) {
  const Polygon flat{{0, 0}, {2, 0}, {4, 0}};
  const Vec2 c = area_centroid(flat);
  EXPECT_DOUBLE_EQ(c.x, 2.0);
  EXPECT_DOUBLE_EQ(c.y, 0.0);
}

TEST(Geometry, ContainsAgreesWithWindingNumberOffBoundary) {
  Rng rng(11);
  for (int i = 0; i < 5000; ++i) {
    const Vec2 p{rng.uniform(-0.5, 3.5), rng.uniform(-0.5, 3.5)};
    EXPECT_EQ(contains(kLShape, p), winding_contains(kLShape, p)) << p.x << "," << p.y;
  }
}

TEST(Geometry, ContainsUsesHalfOpenEdges) {
  // Lower/left edges are inside, upper/right edges are outside, so tiled
  // squares never claim the same point twice.
  EXPECT_TRUE(contains(kUnitSquare, {0.0, 0.5}));
  EXPECT_FALSE(contains(kUnitSquare, {1.0, 0.5}));
  const Polygon right = translated(kUnitSquare, {1.0, 0.0});
  EXPECT_TRUE(contains(right, {1.0, 0.5}));
}

TEST(Geometry, SimplicityDetectsBowTie) {
  EXPECT_TRUE(is_simple(kLShape));
  const Polygon bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  EXPECT_FALSE(is_simple(bowtie));
}

TEST(Geometry, NearestEdgeAndSegmentDistance) {
  EXPECT_DOUBLE_EQ(distance_to_segment({0.5, 2}, {0, 0}, {1, 0}), 2.0);
  EXPECT_DOUBLE_EQ(distance_to_segment({3, 4}, {0, 0}, {0, 0}), 5.0);
  EXPECT_DOUBLE_EQ(distance_to_segment({-3, 4}, {0, 0}, {1, 0}), 5.0);
  const EdgeHit h = nearest_edge(kUnitSquare, {0.5, 0.9});
  EXPECT_EQ(h.edge, 2u);
  EXPECT_NEAR(h.distance, 0.1, 1e-12);
}

TEST(Geometry, TransformRotatesThenTranslates) {
  const Polygon p = transformed(kUnitSquare, std::numbers::pi / 2, {10, 0});
  EXPECT_NEAR(p[1].x, 10.0, 1e-12);
  EXPECT_NEAR(p[1].y, 1.0, 1e-12);
  EXPECT_NEAR(signed_area(p), 1.0, 1e-12);
}

TEST(Geometry, EllipseIsCounterClockwiseAndCentred) {
  const Polygon e = ellipse(0.2, 0.1, 64);
  ASSERT_EQ(e.size(), 64u);
  EXPECT_GT(signed_area(e), 0.0);
  // Inscribed 64-gon area: (n/2) sin(2 pi / n) rx ry.
  EXPECT_NEAR(signed_area(e), 32 * std::sin(2 * std::numbers::pi / 64) * 0.2 * 0.1, 1e-12);
  const Vec2 c = area_centroid(e);
  EXPECT_NEAR(c.x, 0.0, 1e-12);
  EXPECT_NEAR(c.y, 0.0, 1e-12);
  const Box b = bounding_box(e);
  EXPECT_NEAR(b.width(), 0.4, 1e-12);
}

TEST(Geometry, AngleBetweenIsUnsigned) {
  EXPECT_NEAR(angle_between({1, 0}, {0, 1}), std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(angle_between({1, 0}, {0, -1}), std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(angle_between({1, 0}, {-1, 0}), std::numbers::pi, 1e-12);
}

}  // namespace
}  // namespace flatgrasp
