#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "flatgrasp/geometry.hpp"

namespace flatgrasp {

// Workspace discretization: a 1 m square table seen as a 224x224 orthographic
// heightmap, one cell per pixel. The policy acts on a 56x56 map, 4 pixels
// per action cell.
inline constexpr int kGridSize = 224;
inline constexpr double kWorkspaceSize = 1.0;
inline constexpr double kCellSize = kWorkspaceSize / kGridSize;
inline constexpr double kWorkspaceMargin = 0.05;
inline constexpr int kFeatureSize = 56;
inline constexpr int kFeatureStride = kGridSize / kFeatureSize;
inline constexpr int kActionCount = kFeatureSize * kFeatureSize;
inline constexpr std::array<float, 3> kBackgroundColor{0.5f, 0.5f, 0.5f};

enum class Family {
  kTrainingSquare,
  kTrainingRectangle,
  kTrainingCircle,
  kTrainingTriangle,
  kBeveledSquare,
  kBeveledRectangle,
  kBeveledCircle,
  kBeveledTriangle,
  kBeveledParallelogram,
  kBeveledTrapezoid,
  kBeveledOval,
  kBeveledHexagon,
  kBeveledPentagon,
  kBeveledNotch,
  kIrregularL,
  kIrregularT,
  kIrregularE,
  kIrregularU,
  kIrregularH,
  kIrregularZ,
  kIrregularF,
  kIrregularPlus,
  kIrregularStep,
  kIrregularJ,
  kHouseholdPlate,
  kHouseholdBook,
  kHouseholdBookholder,
  kHouseholdBowl,
  kHouseholdBasket,
  kHouseholdGelatinBox,
  kHouseholdSugarCan,
  kHouseholdCrackerBox,
  kHouseholdPot,
  kHouseholdLiptonBox,
};

std::string_view family_tag(Family f);
// Throws InvalidArgument for unknown tags.
Family parse_family(std::string_view tag);
const std::vector<Family>& all_families();
const std::vector<Family>& training_families();
const std::vector<Family>& beveled_families();
const std::vector<Family>& irregular_families();
const std::vector<Family>& household_families();

struct ObjectBounds {
  double min_extent = 0.18;
  double max_extent = 0.44;
  double min_height = 0.025;
  double max_height = 0.095;
};

// A flat object. The footprint is given in the object frame with its area
// centroid at the origin.
struct ObjectModel {
  Family family = Family::kTrainingSquare;
  std::uint64_t seed = 0;
  Polygon footprint;            // CCW, metres
  double height = 0.0;          // metres
  // Per-edge side-face inclination from vertical, edge i = (v[i], v[i+1]).
  // Positive: chamfered face, the top is inset by height*tan(bevel), so the
  // depth map ramps up from the silhouette edge. Negative: undercut face.
  std::vector<double> bevel;
  double mass = 1.0;            // kg
  double friction = 0.8;        // Coulomb mu
  std::array<float, 3> color{0.8f, 0.2f, 0.2f};
  // Household proxies: a raised rim of this width around a lower floor.
  double rim_width = 0.0;
  double inner_height = 0.0;
  // Named generation parameters, recorded in object-set manifests.
  std::map<std::string, double> dims;

  double extent() const;
};

ObjectModel generate_object(Family family, std::uint64_t seed, const ObjectBounds& bounds = {});

struct Pose2D {
  double x = 0.5;
  double y = 0.5;
  double theta = 0.0;
};

struct Scene {
  ObjectModel object;
  Pose2D pose;

  Polygon posed_footprint() const;
  // Area centroid of the posed footprint (uniform density centre of mass).
  Vec2 center_of_mass() const;
};

// Rejection sampling until the posed footprint is inside the workspace minus
// the margin. Throws PlacementFailure after 1000 attempts.
Pose2D sample_pose(const ObjectModel& object, std::uint64_t seed);
bool pose_fits(const ObjectModel& object, const Pose2D& pose);

// Row index follows world y, column index follows world x.
struct Cell {
  int row = 0;
  int col = 0;
  bool operator==(const Cell&) const = default;
};

Cell world_to_pixel(Vec2 p);
Vec2 pixel_to_world(Cell c);
inline bool in_grid(Cell c, int size = kGridSize) {
  return c.row >= 0 && c.col >= 0 && c.row < size && c.col < size;
}

struct Observation {
  std::vector<float> color;          // 3 x 224 x 224, channel-major
  std::vector<double> depth;         // 224 x 224, metres above table
  std::vector<std::uint8_t> mask;    // 224 x 224, 0/1

  Observation();
  static constexpr std::size_t index(int row, int col) {
    return static_cast<std::size_t>(row) * kGridSize + static_cast<std::size_t>(col);
  }
  std::size_t mask_count() const;
};

Observation rasterize(const Scene& scene);

// Surface height of the posed object at a workspace point; 0 outside.
double surface_height(const Scene& scene, const Polygon& posed, Vec2 p);

}  // namespace flatgrasp
