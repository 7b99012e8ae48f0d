#include "flatgrasp/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "flatgrasp/error.hpp"

namespace flatgrasp {

namespace {

constexpr int kDirs[8][2] = {{0, -1}, {-1, -1}, {-1, 0}, {-1, 1},
                             {0, 1},  {1, 1},   {1, 0},  {1, -1}};

int dir_index(int dr, int dc) {
  for (int i = 0; i < 8; ++i)
    if (kDirs[i][0] == dr && kDirs[i][1] == dc) return i;
  return -1;
}

// 8-connected component labelling; returns labels (0 = background) and sizes.
std::vector<int> label_components(std::span<const std::uint8_t> mask, std::vector<int>& sizes) {
  std::vector<int> label(mask.size(), 0);
  sizes.assign(1, 0);
  std::vector<int> stack;
  for (int start = 0; start < static_cast<int>(mask.size()); ++start) {
    if (!mask[start] || label[start]) continue;
    const int id = static_cast<int>(sizes.size());
    sizes.push_back(0);
    stack.push_back(start);
    label[start] = id;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      ++sizes[id];
      const int r = p / kGridSize, c = p % kGridSize;
      for (const auto& d : kDirs) {
        const int rr = r + d[0], cc = c + d[1];
        if (rr < 0 || cc < 0 || rr >= kGridSize || cc >= kGridSize) continue;
        const int q = rr * kGridSize + cc;
        if (mask[q] && !label[q]) {
          label[q] = id;
          stack.push_back(q);
        }
      }
    }
  }
  return label;
}

Contour trace_component(const std::vector<int>& label, int id) {
  Contour out;
  int start = -1;
  for (int i = 0; i < static_cast<int>(label.size()); ++i)
    if (label[i] == id) {
      start = i;
      break;
    }
  if (start < 0) return out;

  auto fg = [&](int r, int c) {
    return r >= 0 && c >= 0 && r < kGridSize && c < kGridSize && label[r * kGridSize + c] == id;
  };

  const Cell s{start / kGridSize, start % kGridSize};
  // Raster-first pixel: its west neighbour is never part of the component.
  const Cell s_back{s.row, s.col - 1};
  // One Moore step: the first foreground neighbour clockwise from the backtrack.
  auto step = [&](Cell& p, Cell& b) {
    const int k = dir_index(b.row - p.row, b.col - p.col);
    for (int i = 1; i <= 8; ++i) {
      const int j = (k + i) % 8;
      const Cell q{p.row + kDirs[j][0], p.col + kDirs[j][1]};
      if (fg(q.row, q.col)) {
        const int jb = (k + i - 1) % 8;
        b = {p.row + kDirs[jb][0], p.col + kDirs[jb][1]};
        p = q;
        return true;
      }
    }
    return false;
  };

  Cell p = s, b = s_back;
  out.cells.push_back(p);
  if (!step(p, b)) {
    // isolated pixel
  } else {
    const Cell second = p;
    const std::size_t cap = 4 * label.size();
    for (std::size_t iter = 0; iter < cap; ++iter) {
      if (p == s) {
        // Back at the start: done once the trace would repeat its first move.
        Cell pn = p, bn = b;
        step(pn, bn);
        if (pn == second) break;
      }
      out.cells.push_back(p);
      step(p, b);
    }
  }

  // Orient counter-clockwise with x = col, y = row.
  double area2 = 0.0;
  const std::size_t n = out.cells.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++)
    area2 += static_cast<double>(out.cells[j].col) * out.cells[i].row -
             static_cast<double>(out.cells[i].col) * out.cells[j].row;
  if (area2 < 0) std::reverse(out.cells.begin(), out.cells.end());

  // Central-difference tangents, box-smoothed over 5 cells, rotated outward.
  out.normals.assign(n, Vec2{1.0, 0.0});
  if (n >= 3) {
    std::vector<Vec2> tangent(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Cell a = out.cells[(i + n - 1) % n], c = out.cells[(i + 1) % n];
      tangent[i] = {static_cast<double>(c.col - a.col), static_cast<double>(c.row - a.row)};
    }
    const long ln = static_cast<long>(n);
    for (long i = 0; i < ln; ++i) {
      Vec2 t;
      for (long k = -2; k <= 2; ++k) t += tangent[static_cast<std::size_t>(((i + k) % ln + ln) % ln)];
      out.normals[static_cast<std::size_t>(i)] = normalized(Vec2{t.y, -t.x});
    }
  }
  return out;
}

}  // namespace

Contour extract_contour(std::span<const std::uint8_t> mask) {
  if (mask.size() != static_cast<std::size_t>(kGridSize) * kGridSize)
    throw InvalidArgument("mask must be 224x224");
  std::vector<int> sizes;
  const auto label = label_components(mask, sizes);
  if (sizes.size() <= 1) return {};
  const int id = static_cast<int>(std::max_element(sizes.begin() + 1, sizes.end()) - sizes.begin());
  return trace_component(label, id);
}

Contour extract_contour(std::span<const std::uint8_t> mask, Cell seed) {
  if (mask.size() != static_cast<std::size_t>(kGridSize) * kGridSize)
    throw InvalidArgument("mask must be 224x224");
  if (!in_grid(seed) || !mask[Observation::index(seed.row, seed.col)]) return {};
  std::vector<int> sizes;
  const auto label = label_components(mask, sizes);
  return trace_component(label, label[Observation::index(seed.row, seed.col)]);
}

MainPoint main_point(Cell feature_cell) {
  if (!in_grid(feature_cell, kFeatureSize)) throw InvalidArgument("feature cell outside the 56x56 map");
  MainPoint m;
  m.feature_cell = feature_cell;
  m.pixel = {kFeatureStride * feature_cell.row + kFeatureStride / 2,
             kFeatureStride * feature_cell.col + kFeatureStride / 2};
  m.world = pixel_to_world(m.pixel);
  return m;
}

MainPoint main_point(int action_index) {
  if (action_index < 0 || action_index >= kActionCount) throw InvalidArgument("action index out of range");
  return main_point(Cell{action_index / kFeatureSize, action_index % kFeatureSize});
}

std::optional<AxisCast> cast_axis(Cell main_pixel, double axis_deg, std::span<const std::uint8_t> mask) {
  if (!in_grid(main_pixel) || !mask[Observation::index(main_pixel.row, main_pixel.col)]) return std::nullopt;
  const double a = axis_deg * std::numbers::pi / 180.0;
  const Vec2 dir{std::cos(a), std::sin(a)};
  const Vec2 origin{main_pixel.col + 0.5, main_pixel.row + 0.5};

  auto march = [&](double sign) -> std::optional<AxisHit> {
    std::optional<AxisHit> best;
    // Samples sit a quarter pixel off the half-pixel lattice so none lands on
    // a cell edge; the sample set is then symmetric under a 180 deg turn.
    for (int k = 1;; ++k) {
      const double t = 0.5 * k - 0.25;
      const Vec2 pos = origin + dir * (sign * t);
      const Cell c{static_cast<int>(std::floor(pos.y)), static_cast<int>(std::floor(pos.x))};
      if (!in_grid(c)) break;
      if (c != main_pixel && mask[Observation::index(c.row, c.col)]) best = AxisHit{c, pos, t};
    }
    return best;
  };
  auto fwd = march(1.0);
  auto bwd = march(-1.0);
  if (!fwd || !bwd) return std::nullopt;
  return AxisCast{*fwd, *bwd};
}

std::string_view failure_reason_name(FailureReason r) {
  switch (r) {
    case FailureReason::kNone: return "none";
    case FailureReason::kOffObject: return "off-object";
    case FailureReason::kNoAxisFound: return "no-axis-found";
    case FailureReason::kTooShort: return "too-short";
  }
  return "none";
}

FailureReason parse_failure_reason(std::string_view name) {
  for (auto r : {FailureReason::kNone, FailureReason::kOffObject, FailureReason::kNoAxisFound,
                 FailureReason::kTooShort})
    if (failure_reason_name(r) == name) return r;
  throw InvalidArgument("unknown failure reason '" + std::string(name) + "'");
}

SideMetadata side_metadata(const Scene& scene) {
  return {scene.posed_footprint(), scene.object.bevel};
}

namespace {

double depth_at(std::span<const double> depth, Vec2 pixel) {
  const Cell c{static_cast<int>(std::floor(pixel.y)), static_cast<int>(std::floor(pixel.x))};
  if (!in_grid(c)) return 0.0;
  return depth[Observation::index(c.row, c.col)];
}

struct FaceProfile {
  double height = 0.0;
  double bevel = 0.0;
};

// Walk from the hit back towards the main point: the face height is the
// highest surface seen within the window; the ramp length up to 95% of it
// gives a bevel estimate when no side metadata is available.
FaceProfile face_profile(std::span<const double> depth, const AxisHit& hit, Vec2 inward, int window) {
  FaceProfile f;
  const int steps = std::min(2 * window, static_cast<int>(2.0 * hit.t));
  std::vector<double> h(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) {
    h[k] = depth_at(depth, hit.pixel + inward * (0.5 * k));
    f.height = std::max(f.height, h[k]);
  }
  if (f.height <= 0.0) return f;
  for (int k = 0; k <= steps; ++k) {
    if (h[k] >= 0.95 * f.height) {
      const double run = 0.5 * k * kCellSize;
      if (k >= 3) f.bevel = std::atan2(run, f.height);
      break;
    }
  }
  return f;
}

GraspSide refine_at(const Contour& contour, std::size_t best, std::size_t offset) {
  GraspSide side;
  const std::size_t n = contour.size();
  const std::size_t idx[3] = {(best + n - offset % n) % n, best, (best + offset) % n};
  Vec2 normal_sum;
  Vec2 point_sum;
  for (int k = 0; k < 3; ++k) {
    side.points[k] = pixel_to_world(contour.cells[idx[k]]);
    point_sum += side.points[k];
    normal_sum += contour.normals[idx[k]];
  }
  side.contact = point_sum / 3.0;
  side.inward_normal = normalized(normal_sum) * -1.0;
  if (!(norm(side.inward_normal) > 0.5)) side.inward_normal = contour.normals[best] * -1.0;
  return side;
}

// Three contour cells around the one nearest the hit. At sharp corners the
// mean of the +-offset cells can leave the contour or drift off the axis;
// the offset then shrinks until it stays within 1 px of the contour and
// 2 px of the axis line.
GraspSide refine(const Contour& contour, const AxisHit& hit, int offset, Vec2 origin, Vec2 dir) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < contour.size(); ++i) {
    const Vec2 c{contour.cells[i].col + 0.5, contour.cells[i].row + 0.5};
    const double d = norm(c - hit.pixel);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  for (int k = offset; k > 0; --k) {
    GraspSide side = refine_at(contour, best, static_cast<std::size_t>(k));
    const Vec2 p = side.contact / kCellSize;
    if (std::abs(cross(dir, p - origin)) > 2.0) continue;
    double nearest = std::numeric_limits<double>::infinity();
    for (const Cell& c : contour.cells) nearest = std::min(nearest, norm(Vec2{c.col + 0.5, c.row + 0.5} - p));
    if (nearest <= 1.0) return side;
  }
  return refine_at(contour, best, 0);
}

}  // namespace

GraspPlan decode(Cell feature_cell, std::span<const std::uint8_t> mask, std::span<const double> depth,
                 const SideMetadata* sides, const DecoderParams& params) {
  return decode_pixel(main_point(feature_cell).pixel, mask, depth, sides, params);
}

GraspPlan decode_pixel(Cell main_pixel, std::span<const std::uint8_t> mask, std::span<const double> depth,
                       const SideMetadata* sides, const DecoderParams& params) {
  const std::size_t plane = static_cast<std::size_t>(kGridSize) * kGridSize;
  if (mask.size() != plane || depth.size() != plane) throw InvalidArgument("heightmaps must be 224x224");
  if (!in_grid(main_pixel)) throw InvalidArgument("main pixel outside the grid");

  GraspPlan plan;
  plan.main.feature_cell = {main_pixel.row / kFeatureStride, main_pixel.col / kFeatureStride};
  plan.main.pixel = main_pixel;
  plan.main.world = pixel_to_world(main_pixel);
  plan.axis_deg = params.axes_deg[0];
  const Cell px = plan.main.pixel;
  if (!mask[Observation::index(px.row, px.col)]) {
    plan.failure_reason = FailureReason::kOffObject;
    return plan;
  }

  std::optional<Contour> contour;
  FailureReason first_reason = FailureReason::kNone;
  for (double axis : params.axes_deg) {
    FailureReason reason = FailureReason::kNone;
    const auto cast = cast_axis(px, axis, mask);
    double sep = 0.0;
    FaceProfile fa, fb;
    if (!cast) {
      reason = FailureReason::kTooShort;
    } else {
      sep = norm(cast->forward.pixel - cast->backward.pixel) * kCellSize;
      const Vec2 dir = normalized(cast->forward.pixel - cast->backward.pixel);
      if (sep < params.min_separation) {
        reason = FailureReason::kTooShort;
      } else if (sep > params.max_separation) {
        reason = FailureReason::kNoAxisFound;
      } else {
        fa = face_profile(depth, cast->forward, dir * -1.0, params.face_window);
        fb = face_profile(depth, cast->backward, dir, params.face_window);
        if (std::min(fa.height, fb.height) < params.min_face_height) reason = FailureReason::kNoAxisFound;
      }
    }
    if (reason != FailureReason::kNone) {
      if (first_reason == FailureReason::kNone) first_reason = reason;
      continue;
    }

    if (!contour) contour = extract_contour(mask, px);
    const Vec2 origin{px.col + 0.5, px.row + 0.5};
    const double rad = axis * std::numbers::pi / 180.0;
    const Vec2 axis_dir{std::cos(rad), std::sin(rad)};
    GraspSide a = refine(*contour, cast->forward, params.refine_offset, origin, axis_dir);
    GraspSide b = refine(*contour, cast->backward, params.refine_offset, origin, axis_dir);
    // The refined contacts must keep the separation bounds too.
    const double refined = norm(a.contact - b.contact);
    if (refined < params.min_separation || refined > params.max_separation) {
      if (first_reason == FailureReason::kNone)
        first_reason = refined < params.min_separation ? FailureReason::kTooShort : FailureReason::kNoAxisFound;
      continue;
    }
    plan.axis_deg = axis;
    plan.side_a = a;
    plan.side_b = b;
    plan.side_a.face_height = fa.height;
    plan.side_b.face_height = fb.height;
    if (sides && !sides->posed_footprint.empty()) {
      plan.side_a.face_bevel = sides->bevel[nearest_edge(sides->posed_footprint, plan.side_a.contact).edge];
      plan.side_b.face_bevel = sides->bevel[nearest_edge(sides->posed_footprint, plan.side_b.contact).edge];
    } else {
      plan.side_a.face_bevel = fa.bevel;
      plan.side_b.face_bevel = fb.bevel;
    }
    plan.valid = true;
    plan.failure_reason = FailureReason::kNone;
    return plan;
  }
  plan.axis_deg = params.axes_deg[0];
  plan.failure_reason = first_reason;
  return plan;
}

}  // namespace flatgrasp
