#include "flatgrasp/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flatgrasp/error.hpp"
#include "flatgrasp/rng.hpp"

namespace flatgrasp {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct FamilyInfo {
  Family family;
  std::string_view tag;
};

constexpr FamilyInfo kFamilies[] = {
    {Family::kTrainingSquare, "training-square"},
    {Family::kTrainingRectangle, "training-rectangle"},
    {Family::kTrainingCircle, "training-circle"},
    {Family::kTrainingTriangle, "training-triangle"},
    {Family::kBeveledSquare, "beveled-square"},
    {Family::kBeveledRectangle, "beveled-rectangle"},
    {Family::kBeveledCircle, "beveled-circle"},
    {Family::kBeveledTriangle, "beveled-triangle"},
    {Family::kBeveledParallelogram, "beveled-parallelogram"},
    {Family::kBeveledTrapezoid, "beveled-trapezoid"},
    {Family::kBeveledOval, "beveled-oval"},
    {Family::kBeveledHexagon, "beveled-hexagon"},
    {Family::kBeveledPentagon, "beveled-pentagon"},
    {Family::kBeveledNotch, "beveled-notch"},
    {Family::kIrregularL, "irregular-L"},
    {Family::kIrregularT, "irregular-T"},
    {Family::kIrregularE, "irregular-E"},
    {Family::kIrregularU, "irregular-U"},
    {Family::kIrregularH, "irregular-H"},
    {Family::kIrregularZ, "irregular-Z"},
    {Family::kIrregularF, "irregular-F"},
    {Family::kIrregularPlus, "irregular-plus"},
    {Family::kIrregularStep, "irregular-step"},
    {Family::kIrregularJ, "irregular-J"},
    {Family::kHouseholdPlate, "household-plate"},
    {Family::kHouseholdBook, "household-book"},
    {Family::kHouseholdBookholder, "household-bookholder"},
    {Family::kHouseholdBowl, "household-bowl"},
    {Family::kHouseholdBasket, "household-basket"},
    {Family::kHouseholdGelatinBox, "household-gelatinbox"},
    {Family::kHouseholdSugarCan, "household-sugarcan"},
    {Family::kHouseholdCrackerBox, "household-crackerbox"},
    {Family::kHouseholdPot, "household-pot"},
    {Family::kHouseholdLiptonBox, "household-liptonbox"},
};

std::vector<Family> families_with_prefix(std::string_view prefix) {
  std::vector<Family> out;
  for (const auto& f : kFamilies)
    if (f.tag.starts_with(prefix)) out.push_back(f.family);
  return out;
}

// Physical parameter ranges shared by every family.
constexpr double kMassLo = 0.3, kMassHi = 1.5;
constexpr double kFrictionLo = 0.7, kFrictionHi = 1.0;
constexpr double kBevelLo = 10.0 * kDeg, kBevelHi = 30.0 * kDeg;

std::array<float, 3> sample_color(Rng& rng) {
  for (;;) {
    std::array<float, 3> c{};
    double dist = 0.0;
    for (int i = 0; i < 3; ++i) {
      c[i] = static_cast<float>(rng.uniform(0.1, 0.9));
      dist = std::max(dist, std::abs(static_cast<double>(c[i]) - kBackgroundColor[i]));
    }
    if (dist >= 0.15) return c;
  }
}

Polygon rect(double w, double h) { return {{0, 0}, {w, 0}, {w, h}, {0, h}}; }

Polygon regular(int n, double circumradius, double phase) {
  Polygon p;
  for (int i = 0; i < n; ++i) {
    const double a = phase + 2.0 * std::numbers::pi * i / n;
    p.push_back({circumradius * std::cos(a), circumradius * std::sin(a)});
  }
  return p;
}

// Thickness of letter strokes for the irregular set.
double stroke(Rng& rng) { return rng.uniform(0.07, 0.10); }

}  // namespace

std::string_view family_tag(Family f) {
  for (const auto& info : kFamilies)
    if (info.family == f) return info.tag;
  return "unknown";
}

Family parse_family(std::string_view tag) {
  for (const auto& info : kFamilies)
    if (info.tag == tag) return info.family;
  throw InvalidArgument("unknown object family '" + std::string(tag) + "'");
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> v = families_with_prefix("");
  return v;
}
const std::vector<Family>& training_families() {
  static const std::vector<Family> v = families_with_prefix("training-");
  return v;
}
const std::vector<Family>& beveled_families() {
  static const std::vector<Family> v = families_with_prefix("beveled-");
  return v;
}
const std::vector<Family>& irregular_families() {
  static const std::vector<Family> v = families_with_prefix("irregular-");
  return v;
}
const std::vector<Family>& household_families() {
  static const std::vector<Family> v = families_with_prefix("household-");
  return v;
}

double ObjectModel::extent() const {
  const Box b = bounding_box(footprint);
  return std::max(b.width(), b.height());
}

ObjectModel generate_object(Family family, std::uint64_t seed, const ObjectBounds& bounds) {
  Rng rng(hash_seed(seed, {static_cast<std::uint64_t>(family), 0x0b1ec7ULL}));
  ObjectModel m;
  m.family = family;
  m.seed = seed;
  m.height = rng.uniform(bounds.min_height, bounds.max_height);
  m.mass = rng.uniform(kMassLo, kMassHi);
  m.friction = rng.uniform(kFrictionLo, kFrictionHi);
  m.color = sample_color(rng);

  const double lo = bounds.min_extent, hi = bounds.max_extent;
  auto& d = m.dims;
  bool per_edge_bevel = false;
  bool uniform_bevel = false;

  switch (family) {
    case Family::kTrainingSquare:
    case Family::kBeveledSquare: {
      const double s = d["side"] = rng.uniform(lo, hi);
      m.footprint = rect(s, s);
      break;
    }
    case Family::kTrainingRectangle:
    case Family::kBeveledRectangle: {
      const double l = d["length"] = rng.uniform(std::max(lo, 0.24), hi);
      const double w = d["width"] = rng.uniform(lo, 0.9 * l);
      m.footprint = rect(l, w);
      break;
    }
    case Family::kTrainingCircle:
    case Family::kBeveledCircle: {
      const double dia = d["diameter"] = rng.uniform(lo, hi);
      m.footprint = ellipse(dia / 2, dia / 2, 64);
      uniform_bevel = true;
      break;
    }
    case Family::kTrainingTriangle:
    case Family::kBeveledTriangle: {
      const double s = d["side"] = rng.uniform(std::max(lo, 0.22), hi);
      m.footprint = {{0, 0}, {s, 0}, {s / 2, s * std::sqrt(3.0) / 2}};
      break;
    }
    case Family::kBeveledParallelogram: {
      const double skew = d["skew"] = rng.uniform(0.04, 0.09);
      const double b = d["base"] = rng.uniform(0.22, hi - skew);
      const double h = d["depth"] = rng.uniform(lo, b);
      m.footprint = {{0, 0}, {b, 0}, {b + skew, h}, {skew, h}};
      break;
    }
    case Family::kBeveledTrapezoid: {
      const double b = d["bottom"] = rng.uniform(0.26, hi);
      const double t = d["top"] = rng.uniform(0.5 * b, 0.8 * b);
      const double h = d["depth"] = rng.uniform(lo, 0.32);
      m.footprint = {{0, 0}, {b, 0}, {(b + t) / 2, h}, {(b - t) / 2, h}};
      break;
    }
    case Family::kBeveledOval: {
      const double rx = d["semi_major"] = rng.uniform(0.12, hi / 2);
      const double ry = d["semi_minor"] = rng.uniform(lo / 2, 0.8 * rx);
      m.footprint = ellipse(rx, ry, 64);
      uniform_bevel = true;
      break;
    }
    case Family::kBeveledHexagon: {
      const double r = d["circumradius"] = rng.uniform(0.11, hi / 2);
      m.footprint = regular(6, r, 0.0);
      break;
    }
    case Family::kBeveledPentagon: {
      const double r = d["circumradius"] = rng.uniform(0.11, hi / (2 * std::sin(72 * kDeg)));
      m.footprint = regular(5, r, std::numbers::pi / 2);
      break;
    }
    case Family::kBeveledNotch: {
      const double l = d["length"] = rng.uniform(0.28, hi);
      const double w = d["width"] = rng.uniform(0.2, 0.9 * l);
      const double nw = d["notch_width"] = rng.uniform(0.2, 0.35) * l;
      const double nd = d["notch_depth"] = rng.uniform(0.2, 0.35) * w;
      const double a = l / 2 - nw / 2, b = l / 2 + nw / 2;
      m.footprint = {{0, 0}, {l, 0}, {l, w}, {b, w}, {b, w - nd}, {a, w - nd}, {a, w}, {0, w}};
      break;
    }
    case Family::kIrregularL: {
      const double t = d["stroke"] = stroke(rng);
      const double w = d["width"] = rng.uniform(0.24, hi);
      const double h = d["span"] = rng.uniform(0.24, hi);
      m.footprint = {{0, 0}, {w, 0}, {w, t}, {t, t}, {t, h}, {0, h}};
      break;
    }
    case Family::kIrregularT: {
      const double t = d["stroke"] = stroke(rng);
      const double w = d["width"] = rng.uniform(0.24, hi);
      const double h = d["span"] = rng.uniform(0.24, hi);
      m.footprint = {{-t / 2, 0},    {t / 2, 0},  {t / 2, h - t},  {w / 2, h - t},
                     {w / 2, h},     {-w / 2, h}, {-w / 2, h - t}, {-t / 2, h - t}};
      break;
    }
    case Family::kIrregularE: {
      const double h = d["span"] = rng.uniform(0.32, hi);
      const double t = d["stroke"] = std::min(stroke(rng), h / 5.0);
      const double w = d["width"] = rng.uniform(0.22, hi);
      const double mid = d["middle_length"] = rng.uniform(0.6, 0.9) * w;
      const double c0 = h / 2 - t / 2, c1 = h / 2 + t / 2;
      m.footprint = {{0, 0},  {w, 0},   {w, t}, {t, t}, {t, c0}, {mid, c0}, {mid, c1},
                     {t, c1}, {t, h - t}, {w, h - t}, {w, h}, {0, h}};
      break;
    }
    case Family::kIrregularU: {
      const double t = d["stroke"] = stroke(rng);
      const double w = d["width"] = rng.uniform(0.26, hi);
      const double h = d["span"] = rng.uniform(0.24, hi);
      m.footprint = {{0, 0}, {w, 0}, {w, h}, {w - t, h}, {w - t, t}, {t, t}, {t, h}, {0, h}};
      break;
    }
    case Family::kIrregularH: {
      const double t = d["stroke"] = stroke(rng);
      const double w = d["width"] = rng.uniform(0.26, hi);
      const double h = d["span"] = rng.uniform(0.24, hi);
      const double c0 = h / 2 - t / 2, c1 = h / 2 + t / 2;
      m.footprint = {{0, 0},      {t, 0},     {t, c0},     {w - t, c0}, {w - t, 0}, {w, 0},
                     {w, h},      {w - t, h}, {w - t, c1}, {t, c1},     {t, h},     {0, h}};
      break;
    }
    case Family::kIrregularZ: {
      const double t = d["stroke"] = stroke(rng);
      const double w = d["width"] = rng.uniform(0.26, hi);
      const double h = d["span"] = rng.uniform(0.24, hi);
      const double a = w / 2 + t / 2;
      m.footprint = {{a - t, 0}, {w, 0}, {w, t}, {a, t}, {a, h}, {0, h}, {0, h - t}, {a - t, h - t}};
      break;
    }
    case Family::kIrregularF: {
      const double t = d["stroke"] = stroke(rng);
      const double w = d["width"] = rng.uniform(0.22, hi);
      const double h = d["span"] = rng.uniform(std::max(0.28, 3 * t + 0.05), hi);
      const double mid = d["middle_length"] = rng.uniform(0.55, 0.8) * w;
      const double c0 = h / 2 - t / 2, c1 = h / 2 + t / 2;
      m.footprint = {{0, 0},   {t, 0},  {t, c0},    {mid, c0}, {mid, c1},
                     {t, c1},  {t, h - t}, {w, h - t}, {w, h},   {0, h}};
      break;
    }
    case Family::kIrregularPlus: {
      const double t = d["stroke"] = rng.uniform(0.08, 0.12);
      const double w = d["width"] = rng.uniform(0.24, hi);
      const double h = d["span"] = rng.uniform(0.24, hi);
      const double a = t / 2, x = w / 2, y = h / 2;
      m.footprint = {{-a, -y}, {a, -y}, {a, -a}, {x, -a}, {x, a},   {a, a},
                     {a, y},   {-a, y}, {-a, a}, {-x, a}, {-x, -a}, {-a, -a}};
      break;
    }
    case Family::kIrregularStep: {
      const double w = d["width"] = rng.uniform(0.24, hi);
      const double h = d["span"] = rng.uniform(0.24, hi);
      m.footprint = {{0, 0},         {w, 0},         {w, h / 3},     {2 * w / 3, h / 3},
                     {2 * w / 3, 2 * h / 3}, {w / 3, 2 * h / 3}, {w / 3, h}, {0, h}};
      break;
    }
    case Family::kIrregularJ: {
      const double t = d["stroke"] = stroke(rng);
      const double w = d["width"] = rng.uniform(0.22, 0.34);
      const double h = d["span"] = rng.uniform(0.28, hi);
      const double hook = d["hook"] = rng.uniform(0.25, 0.45) * h;
      m.footprint = {{0, 0}, {w, 0}, {w, h}, {w - t, h}, {w - t, t}, {t, t}, {t, hook}, {0, hook}};
      break;
    }
    case Family::kHouseholdPlate:
    case Family::kHouseholdBowl:
    case Family::kHouseholdPot:
    case Family::kHouseholdSugarCan: {
      double dlo = 0.22, dhi = 0.30, hlo = 0.025, hhi = 0.04, rim = 0.03, floor = 0.4;
      if (family == Family::kHouseholdBowl) {
        dlo = 0.20, hlo = 0.06, hhi = bounds.max_height, rim = 0.02, floor = 0.35;
      } else if (family == Family::kHouseholdPot) {
        dlo = 0.20, dhi = 0.28, hlo = 0.07, hhi = bounds.max_height, rim = 0.015, floor = 0.3;
      } else if (family == Family::kHouseholdSugarCan) {
        dlo = lo, dhi = 0.22, hlo = 0.06, hhi = bounds.max_height, rim = 0.0, floor = 1.0;
      }
      const double dia = d["diameter"] = rng.uniform(dlo, dhi);
      m.height = rng.uniform(hlo, hhi);
      m.footprint = ellipse(dia / 2, dia / 2, 64);
      m.rim_width = d["rim_width"] = rim;
      m.inner_height = floor * m.height;
      break;
    }
    case Family::kHouseholdBook:
    case Family::kHouseholdCrackerBox:
    case Family::kHouseholdGelatinBox:
    case Family::kHouseholdLiptonBox: {
      double llo = 0.22, lhi = 0.30, hlo = 0.025, hhi = 0.05;
      if (family == Family::kHouseholdCrackerBox) hlo = 0.06, hhi = 0.07;
      if (family == Family::kHouseholdGelatinBox) llo = lo, lhi = 0.2, hlo = 0.03, hhi = 0.04;
      if (family == Family::kHouseholdLiptonBox) llo = 0.2, lhi = 0.26, hlo = 0.06, hhi = 0.08;
      const double l = d["length"] = rng.uniform(llo, lhi);
      const double w = d["width"] = rng.uniform(0.16, std::min(0.22, l));
      m.height = rng.uniform(hlo, hhi);
      m.footprint = rect(l, w);
      break;
    }
    case Family::kHouseholdBasket:
    case Family::kHouseholdBookholder: {
      const bool basket = family == Family::kHouseholdBasket;
      const double l = d["length"] = rng.uniform(basket ? 0.30 : 0.25, basket ? hi : 0.35);
      const double w = d["width"] = rng.uniform(basket ? 0.22 : 0.20, basket ? 0.34 : 0.26);
      m.height = rng.uniform(0.06, bounds.max_height);
      m.footprint = rect(l, w);
      m.rim_width = d["rim_width"] = basket ? 0.02 : 0.015;
      m.inner_height = (basket ? 0.15 : 0.3) * m.height;
      break;
    }
  }

  const bool beveled = family_tag(family).starts_with("beveled-");
  per_edge_bevel = beveled && !uniform_bevel;
  m.bevel.assign(m.footprint.size(), 0.0);
  if (beveled) {
    if (per_edge_bevel) {
      for (auto& b : m.bevel) b = rng.uniform(kBevelLo, kBevelHi);
    } else {
      std::fill(m.bevel.begin(), m.bevel.end(), rng.uniform(kBevelLo, kBevelHi));
    }
  }

  if (signed_area(m.footprint) < 0) {
    std::reverse(m.footprint.begin(), m.footprint.end());
    // bevel[i] belongs to edge (v[i], v[i+1]); after reversal that edge is
    // (v'[n-2-i], v'[n-1-i]).
    std::vector<double> b(m.bevel.size());
    const std::size_t n = b.size();
    for (std::size_t i = 0; i < n; ++i) b[(2 * n - 2 - i) % n] = m.bevel[i];
    m.bevel = std::move(b);
  }
  const Vec2 c = area_centroid(m.footprint);
  m.footprint = translated(m.footprint, Vec2{} - c);
  d["height"] = m.height;
  return m;
}

Polygon Scene::posed_footprint() const {
  return transformed(object.footprint, pose.theta, {pose.x, pose.y});
}

Vec2 Scene::center_of_mass() const { return area_centroid(posed_footprint()); }

bool pose_fits(const ObjectModel& object, const Pose2D& pose) {
  const double lo = kWorkspaceMargin, hi = kWorkspaceSize - kWorkspaceMargin;
  const Polygon posed = transformed(object.footprint, pose.theta, {pose.x, pose.y});
  return std::all_of(posed.begin(), posed.end(), [&](Vec2 p) {
    return p.x >= lo && p.x <= hi && p.y >= lo && p.y <= hi;
  });
}

Pose2D sample_pose(const ObjectModel& object, std::uint64_t seed) {
  Rng rng(hash_seed(seed, {0x9053ULL}));
  const double lo = kWorkspaceMargin, hi = kWorkspaceSize - kWorkspaceMargin;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Pose2D p{rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(0.0, 2.0 * std::numbers::pi)};
    if (pose_fits(object, p)) return p;
  }
  throw PlacementFailure("object of extent " + std::to_string(object.extent()) +
                         " m does not fit the workspace after 1000 attempts");
}

Cell world_to_pixel(Vec2 p) {
  if (!(p.x >= 0.0 && p.x <= kWorkspaceSize && p.y >= 0.0 && p.y <= kWorkspaceSize))
    throw InvalidArgument("point outside the workspace");
  const int col = std::min(static_cast<int>(std::floor(p.x / kCellSize)), kGridSize - 1);
  const int row = std::min(static_cast<int>(std::floor(p.y / kCellSize)), kGridSize - 1);
  return {row, col};
}

Vec2 pixel_to_world(Cell c) {
  if (!in_grid(c)) throw InvalidArgument("cell outside the grid");
  return {(c.col + 0.5) * kCellSize, (c.row + 0.5) * kCellSize};
}

Observation::Observation()
    : color(3 * kGridSize * kGridSize),
      depth(kGridSize * kGridSize, 0.0),
      mask(kGridSize * kGridSize, 0) {
  for (int ch = 0; ch < 3; ++ch)
    std::fill_n(color.begin() + ch * kGridSize * kGridSize, kGridSize * kGridSize,
                kBackgroundColor[ch]);
}

std::size_t Observation::mask_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

double surface_height(const Scene& scene, const Polygon& posed, Vec2 p) {
  if (!contains(posed, p)) return 0.0;
  const ObjectModel& obj = scene.object;
  double h = obj.height;
  const std::size_t n = posed.size();
  if (obj.rim_width > 0.0) {
    if (nearest_edge(posed, p).distance > obj.rim_width) h = obj.inner_height;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double b = obj.bevel[i];
    if (b <= 0.0) continue;
    const double dist = distance_to_segment(p, posed[i], posed[(i + 1) % n]);
    h = std::min(h, dist / std::tan(b));
  }
  return h;
}

Observation rasterize(const Scene& scene) {
  Observation obs;
  const Polygon posed = scene.posed_footprint();
  const std::size_t n = posed.size();
  if (n < 3 || std::abs(signed_area(posed)) <= 0.0) return obs;

  const ObjectModel& obj = scene.object;
  const bool flat = obj.rim_width <= 0.0 &&
                    std::none_of(obj.bevel.begin(), obj.bevel.end(), [](double b) { return b > 0.0; });
  const std::size_t plane = static_cast<std::size_t>(kGridSize) * kGridSize;

  // Scanline fill: crossings of every edge with the row's centre line use the
  // same half-open rule as contains(), so a cell is set iff its centre is inside.
  std::vector<double> xs;
  for (int row = 0; row < kGridSize; ++row) {
    const double y = (row + 0.5) * kCellSize;
    xs.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Vec2 a = posed[j], b = posed[i];
      if ((a.y <= y) != (b.y <= y)) xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // centre x_c = (c + 0.5) * cell satisfies xs[k] <= x_c < xs[k+1]
      int c0 = static_cast<int>(std::ceil(xs[k] / kCellSize - 0.5));
      int c1 = static_cast<int>(std::ceil(xs[k + 1] / kCellSize - 0.5)) - 1;
      c0 = std::max(c0, 0);
      c1 = std::min(c1, kGridSize - 1);
      for (int col = c0; col <= c1; ++col) {
        const Vec2 p{(col + 0.5) * kCellSize, y};
        double h = obj.height;
        if (!flat) {
          if (obj.rim_width > 0.0 && nearest_edge(posed, p).distance > obj.rim_width)
            h = obj.inner_height;
          for (std::size_t e = 0; e < n; ++e) {
            const double bev = obj.bevel[e];
            if (bev <= 0.0) continue;
            h = std::min(h, distance_to_segment(p, posed[e], posed[(e + 1) % n]) / std::tan(bev));
          }
        }
        if (!(h > 0.0)) continue;
        const std::size_t idx = Observation::index(row, col);
        obs.mask[idx] = 1;
        obs.depth[idx] = h;
        for (int ch = 0; ch < 3; ++ch) obs.color[ch * plane + idx] = obj.color[ch];
      }
    }
  }
  return obs;
}

}  // namespace flatgrasp
