#include "flatgrasp/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace flatgrasp {

double signed_area(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) acc += cross(poly[j], poly[i]);
  return 0.5 * acc;
}

double perimeter(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) acc += norm(poly[i] - poly[j]);
  return acc;
}

Vec2 area_centroid(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n == 0) return {};
  const double a = signed_area(poly);
  if (std::abs(a) < 1e-15) {
    Vec2 m;
    for (auto p : poly) m += p;
    return m / static_cast<double>(n);
  }
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double w = cross(poly[j], poly[i]);
    cx += (poly[j].x + poly[i].x) * w;
    cy += (poly[j].y + poly[i].y) * w;
  }
  return {cx / (6.0 * a), cy / (6.0 * a)};
}

bool contains(std::span<const Vec2> poly, Vec2 p) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[j], b = poly[i];
    if ((a.y <= p.y) != (b.y <= p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

namespace {

int orient(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  if (v > 1e-15) return 1;
  if (v < -1e-15) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) - 1e-15 <= p.x && p.x <= std::max(a.x, b.x) + 1e-15 &&
         std::min(a.y, b.y) - 1e-15 <= p.y && p.y <= std::max(a.y, b.y) + 1e-15;
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

}  // namespace

bool is_simple(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % n];
    if (norm(b - a) < 1e-12) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      const Vec2 c = poly[j], d = poly[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges share one vertex; they must not overlap collinearly
        // in opposite directions.
        const Vec2 shared = (j == i + 1) ? b : a;
        const Vec2 other1 = (j == i + 1) ? a : b;
        const Vec2 other2 = (j == i + 1) ? d : c;
        if (orient(shared, other1, other2) == 0 &&
            dot(other1 - shared, other2 - shared) > 0.0)
          return false;
        continue;
      }
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

EdgeHit nearest_edge(std::span<const Vec2> poly, Vec2 p) {
  EdgeHit best{0, std::numeric_limits<double>::infinity()};
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = distance_to_segment(p, poly[i], poly[(i + 1) % n]);
    if (d < best.distance) best = {i, d};
  }
  return best;
}

Box bounding_box(std::span<const Vec2> poly) {
  if (poly.empty()) return {};
  Box b{poly[0], poly[0]};
  for (auto p : poly) {
    b.lo.x = std::min(b.lo.x, p.x);
    b.lo.y = std::min(b.lo.y, p.y);
    b.hi.x = std::max(b.hi.x, p.x);
    b.hi.y = std::max(b.hi.y, p.y);
  }
  return b;
}

Polygon translated(std::span<const Vec2> poly, Vec2 offset) {
  Polygon out;
  out.reserve(poly.size());
  for (auto p : poly) out.push_back(p + offset);
  return out;
}

Polygon transformed(std::span<const Vec2> poly, double theta, Vec2 offset) {
  Polygon out;
  out.reserve(poly.size());
  const double c = std::cos(theta), s = std::sin(theta);
  for (auto p : poly) out.push_back({c * p.x - s * p.y + offset.x, s * p.x + c * p.y + offset.y});
  return out;
}

Polygon ellipse(double rx, double ry, int segments) {
  Polygon out;
  out.reserve(static_cast<std::size_t>(segments));
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * std::numbers::pi * i / segments;
    out.push_back({rx * std::cos(a), ry * std::sin(a)});
  }
  return out;
}

}  // namespace flatgrasp
