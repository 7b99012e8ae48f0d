#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace flatgrasp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(Vec2 a) {
  const double n = norm(a);
  return n > 0.0 ? a / n : Vec2{1.0, 0.0};
}
inline Vec2 rotated(Vec2 a, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}
// Unsigned angle between two vectors, in [0, pi].
inline double angle_between(Vec2 a, Vec2 b) {
  return std::atan2(std::abs(cross(a, b)), dot(a, b));
}

using Polygon = std::vector<Vec2>;

// Shoelace; positive for counter-clockwise loops.
double signed_area(std::span<const Vec2> poly);
double perimeter(std::span<const Vec2> poly);
// Area-weighted centroid. Degenerate (zero-area) polygons return the vertex mean.
Vec2 area_centroid(std::span<const Vec2> poly);
// Crossing-number test with the half-open rule used by the rasterizer, so the
// two agree on every cell centre.
bool contains(std::span<const Vec2> poly, Vec2 p);
// No two non-adjacent edges intersect and no adjacent edges fold back.
bool is_simple(std::span<const Vec2> poly);

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b);
// Index i of the edge (poly[i], poly[i+1]) closest to p, and that distance.
struct EdgeHit {
  std::size_t edge = 0;
  double distance = 0.0;
};
EdgeHit nearest_edge(std::span<const Vec2> poly, Vec2 p);

struct Box {
  Vec2 lo;
  Vec2 hi;
  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
};
Box bounding_box(std::span<const Vec2> poly);

Polygon translated(std::span<const Vec2> poly, Vec2 offset);
// Rotate by theta about the origin, then translate.
Polygon transformed(std::span<const Vec2> poly, double theta, Vec2 offset);
// Regular n-gon approximation of an axis-aligned ellipse, CCW, centred at origin.
Polygon ellipse(double rx, double ry, int segments = 64);

}  // namespace flatgrasp
