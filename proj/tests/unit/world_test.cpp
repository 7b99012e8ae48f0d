#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "flatgrasp/error.hpp"
#include "flatgrasp/rng.hpp"
#include "flatgrasp/world.hpp"
#include "oracles.hpp"

namespace flatgrasp {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

TEST(Families, TagsRoundTripAndGroupsPartitionTheSet) {
  std::set<std::string> tags;
  for (Family f : all_families()) {
    EXPECT_EQ(parse_family(family_tag(f)), f);
    tags.insert(std::string(family_tag(f)));
  }
  EXPECT_EQ(tags.size(), all_families().size());
  EXPECT_EQ(training_families().size(), 4u);
  EXPECT_EQ(beveled_families().size(), 10u);
  EXPECT_EQ(irregular_families().size(), 10u);
  EXPECT_EQ(training_families().size() + beveled_families().size() + irregular_families().size() +
                household_families().size(),
            all_families().size());
  EXPECT_THROW(parse_family("training-blob"), InvalidArgument);
}

TEST(GenerateObject, TrainingSquareSeed7) {
  const ObjectModel m = generate_object(Family::kTrainingSquare, 7);
  ASSERT_EQ(m.footprint.size(), 4u);
  const double side = m.dims.at("side");
  EXPECT_GE(side, 0.18);
  EXPECT_LE(side, 0.44);
  EXPECT_NEAR(signed_area(m.footprint), side * side, 1e-12);
  for (double b : m.bevel) EXPECT_EQ(b, 0.0);
  // Colours keep their distance from the gray background.
  double dist = 0.0;
  for (int c = 0; c < 3; ++c) dist = std::max(dist, std::abs(m.color[c] - 0.5));
  EXPECT_GE(dist, 0.15);
}

TEST(GenerateObject, CircleIsCentred64Gon) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ObjectModel m = generate_object(Family::kTrainingCircle, seed);
    EXPECT_EQ(m.footprint.size(), 64u);
    const Vec2 c = area_centroid(m.footprint);
    EXPECT_NEAR(c.x, 0.0, 1e-12);
    EXPECT_NEAR(c.y, 0.0, 1e-12);
  }
}

TEST(GenerateObject, IrregularLCentroidLeavesTheMaterial) {
  // Checked with the fan centroid and the winding-number test, not the library routines.
  int off_material = 0;
  for (std::uint64_t seed = 3; seed < 3 + 20; ++seed) {
    const ObjectModel m = generate_object(Family::kIrregularL, seed);
    if (!testing::winding_contains(m.footprint, testing::fan_centroid(m.footprint))) ++off_material;
  }
  EXPECT_GE(off_material, 1);
}

TEST(GenerateObject, InvariantsHoldForEveryFamily) {
  const ObjectBounds bounds;
  for (Family f : all_families()) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const ObjectModel m = generate_object(f, seed);
      SCOPED_TRACE(std::string(family_tag(f)) + " seed " + std::to_string(seed));
      EXPECT_TRUE(is_simple(m.footprint));
      EXPECT_GT(signed_area(m.footprint), 0.0);
      const Vec2 c = area_centroid(m.footprint);
      EXPECT_NEAR(c.x, 0.0, 1e-9);
      EXPECT_NEAR(c.y, 0.0, 1e-9);
      EXPECT_GE(m.extent(), bounds.min_extent - 1e-9);
      EXPECT_LE(m.extent(), bounds.max_extent + 1e-9);
      EXPECT_GE(m.height, bounds.min_height);
      EXPECT_LE(m.height, bounds.max_height);
      EXPECT_GT(m.mass, 0.0);
      EXPECT_GT(m.friction, 0.0);
      ASSERT_EQ(m.bevel.size(), m.footprint.size());
      const bool beveled = std::find(beveled_families().begin(), beveled_families().end(), f) !=
                           beveled_families().end();
      for (double b : m.bevel) {
        EXPECT_LT(std::abs(b), std::numbers::pi / 2);
        if (beveled) {
          EXPECT_GE(b, 10 * kDeg - 1e-12);
          EXPECT_LE(b, 30 * kDeg + 1e-12);
        }
      }
    }
  }
}

TEST(GenerateObject, DeterministicPerSeed) {
  const ObjectModel a = generate_object(Family::kBeveledNotch, 99);
  const ObjectModel b = generate_object(Family::kBeveledNotch, 99);
  EXPECT_EQ(a.footprint, b.footprint);
  EXPECT_EQ(a.bevel, b.bevel);
  EXPECT_EQ(a.dims, b.dims);
  EXPECT_EQ(a.color, b.color);
  const ObjectModel c = generate_object(Family::kBeveledNotch, 100);
  EXPECT_NE(a.footprint, c.footprint);
}

TEST(SamplePose, SquareFitsInsideMargin) {
  ObjectModel m = generate_object(Family::kTrainingSquare, 1);
  m.footprint = {{-0.15, -0.15}, {0.15, -0.15}, {0.15, 0.15}, {-0.15, 0.15}};
  const Pose2D p = sample_pose(m, 1);
  const Box b = bounding_box(Scene{m, p}.posed_footprint());
  EXPECT_GE(b.lo.x, 0.05);
  EXPECT_GE(b.lo.y, 0.05);
  EXPECT_LE(b.hi.x, 0.95);
  EXPECT_LE(b.hi.y, 0.95);
  const Pose2D q = sample_pose(m, 1);
  EXPECT_EQ(p.x, q.x);
  EXPECT_EQ(p.y, q.y);
  EXPECT_EQ(p.theta, q.theta);
}

TEST(SamplePose, OversizedObjectFailsPlacement) {
  ObjectModel m = generate_object(Family::kTrainingSquare, 1);
  m.footprint = {{-0.6, -0.6}, {0.6, -0.6}, {0.6, 0.6}, {-0.6, 0.6}};
  EXPECT_THROW(sample_pose(m, 1), PlacementFailure);
}

TEST(PixelTransform, Examples) {
  EXPECT_EQ(world_to_pixel({0.0, 0.0}), (Cell{0, 0}));
  const Vec2 p = pixel_to_world({111, 111});
  EXPECT_NEAR(p.x, 111.5 / 224.0, 1e-15);
  EXPECT_NEAR(p.y, 0.497767857142857, 1e-12);
  EXPECT_EQ(world_to_pixel({1.0, 1.0}), (Cell{223, 223}));
  EXPECT_EQ(world_to_pixel({0.7, 0.2}), (Cell{44, 156}));  // row follows y
  EXPECT_THROW(world_to_pixel({-0.01, 0.5}), InvalidArgument);
  EXPECT_THROW(pixel_to_world({224, 0}), InvalidArgument);
}

TEST(PixelTransform, RoundTripWithinHalfCell) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const Vec2 p{rng.uniform(), rng.uniform()};
    const Vec2 q = pixel_to_world(world_to_pixel(p));
    EXPECT_LE(std::max(std::abs(p.x - q.x), std::abs(p.y - q.y)), 1.0 / 448.0 + 1e-15);
  }
}

Scene centred_square(double side) {
  ObjectModel m = generate_object(Family::kTrainingSquare, 1);
  const double h = side / 2;
  m.footprint = {{-h, -h}, {h, -h}, {h, h}, {-h, h}};
  m.bevel.assign(4, 0.0);
  return Scene{m, Pose2D{0.5, 0.5, 0.0}};
}

TEST(Rasterize, CentredSquareIs50By50Block) {
  const Observation obs = rasterize(centred_square(0.224));
  int rmin = kGridSize, rmax = -1, cmin = kGridSize, cmax = -1;
  for (int r = 0; r < kGridSize; ++r)
    for (int c = 0; c < kGridSize; ++c)
      if (obs.mask[Observation::index(r, c)]) {
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
      }
  EXPECT_NEAR(rmax - rmin + 1, 50, 1);
  EXPECT_NEAR(cmax - cmin + 1, 50, 1);
  EXPECT_EQ(obs.mask_count(), static_cast<std::size_t>((rmax - rmin + 1) * (cmax - cmin + 1)));
}

TEST(Rasterize, ZeroAreaObjectLeavesEmptyMaps) {
  Scene s = centred_square(0.2);
  s.object.footprint = {{0, 0}, {0, 0}, {0, 0}};
  s.object.bevel.assign(3, 0.0);
  const Observation obs = rasterize(s);
  EXPECT_EQ(obs.mask_count(), 0u);
  for (double d : obs.depth) EXPECT_EQ(d, 0.0);
}

TEST(Rasterize, ColourFollowsMask) {
  const Scene s = centred_square(0.3);
  const Observation obs = rasterize(s);
  const std::size_t plane = static_cast<std::size_t>(kGridSize) * kGridSize;
  for (std::size_t i = 0; i < plane; ++i)
    for (int c = 0; c < 3; ++c)
      EXPECT_EQ(obs.color[c * plane + i], obs.mask[i] ? s.object.color[c] : kBackgroundColor[c]);
}

TEST(Rasterize, BevelRampsDepthFromTheEdge) {
  Scene s = centred_square(0.3);
  s.object.height = 0.05;
  s.object.bevel.assign(4, 30 * kDeg);
  const Observation obs = rasterize(s);
  // Run of the ramp: h tan(30 deg) = 0.0289 m, about 6.5 cells.
  const int row = 112;
  const int first = 112 - 33;  // left edge near column 78.4
  double prev = -1.0;
  int rising = 0;
  for (int c = first - 2; c < first + 10; ++c) {
    const double d = obs.depth[Observation::index(row, c)];
    if (d > prev + 1e-12) ++rising;
    prev = d;
  }
  EXPECT_GE(rising, 6);
  EXPECT_NEAR(obs.depth[Observation::index(112, 112)], 0.05, 1e-12);
}

}  // namespace
}  // namespace flatgrasp
