#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "flatgrasp/geometry.hpp"
#include "flatgrasp/world.hpp"

namespace flatgrasp {

// Closed boundary loop of a mask component, counter-clockwise in world
// orientation (x = column, y = row).
struct Contour {
  std::vector<Cell> cells;
  std::vector<Vec2> normals;  // outward, unit, one per cell

  std::size_t size() const { return cells.size(); }
  bool empty() const { return cells.empty(); }
};

// Moore-neighbour trace of the largest 8-connected component of the mask.
Contour extract_contour(std::span<const std::uint8_t> mask);
// Same, for the component that contains `seed` (empty if seed is background).
Contour extract_contour(std::span<const std::uint8_t> mask, Cell seed);

struct MainPoint {
  Cell feature_cell;
  Cell pixel;
  Vec2 world;
};

// Feature cell (r, c) -> image pixel (4r + 2, 4c + 2) -> world.
MainPoint main_point(Cell feature_cell);
MainPoint main_point(int action_index);

struct AxisHit {
  Cell cell;     // farthest mask cell along the ray
  Vec2 pixel;    // sample position on the cast line, pixel units (x = col, y = row)
  double t = 0;  // distance from the main point, pixels
};

struct AxisCast {
  AxisHit forward;   // along +direction
  AxisHit backward;  // along -direction
};

// March from the main pixel centre in both directions at half-pixel steps
// (starting a quarter pixel out) and keep the farthest mask sample on each side. Empty if the main pixel is
// background or one side has no mask sample beyond the main pixel.
std::optional<AxisCast> cast_axis(Cell main_pixel, double axis_deg,
                                  std::span<const std::uint8_t> mask);

enum class FailureReason { kNone, kOffObject, kNoAxisFound, kTooShort };
std::string_view failure_reason_name(FailureReason r);
FailureReason parse_failure_reason(std::string_view name);

struct GraspSide {
  std::array<Vec2, 3> points{};  // world, metres
  Vec2 contact;                  // mean of points
  Vec2 inward_normal;            // unit
  double face_height = 0.0;      // metres
  double face_bevel = 0.0;       // radians, same convention as ObjectModel::bevel
};

struct GraspPlan {
  MainPoint main;
  double axis_deg = 0.0;
  GraspSide side_a;  // along +axis direction
  GraspSide side_b;  // along -axis direction
  bool valid = false;
  FailureReason failure_reason = FailureReason::kOffObject;
};

struct DecoderParams {
  double min_separation = 0.15;   // d_min
  double min_face_height = 0.02;  // h_min
  double max_separation = 0.9;    // reach bound
  int refine_offset = 3;          // contour cells either side of the hit
  int face_window = 16;           // pixels scanned inward for the face height
  std::array<double, 3> axes_deg{0.0, 60.0, 120.0};
};

// Ground-truth side geometry, when the caller has it (simulation). Without it
// the face bevel is estimated from the depth ramp.
struct SideMetadata {
  Polygon posed_footprint;
  std::vector<double> bevel;
};

SideMetadata side_metadata(const Scene& scene);

GraspPlan decode(Cell feature_cell, std::span<const std::uint8_t> mask,
                 std::span<const double> depth, const SideMetadata* sides = nullptr,
                 const DecoderParams& params = {});
// Same, seeded at an arbitrary image pixel; the feature cell is the block containing it.
GraspPlan decode_pixel(Cell main_pixel, std::span<const std::uint8_t> mask,
                       std::span<const double> depth, const SideMetadata* sides = nullptr,
                       const DecoderParams& params = {});

inline Vec2 pixel_point_to_world(Vec2 pixel) { return pixel * kCellSize; }

}  // namespace flatgrasp
