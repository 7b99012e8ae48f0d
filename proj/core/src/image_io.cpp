#include "flatgrasp/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "flatgrasp/error.hpp"

namespace flatgrasp {

namespace fs = std::filesystem;

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_fail(png_structp, png_const_charp msg) { throw FormatError(std::string("png: ") + msg); }
void png_warn(png_structp, png_const_charp) {}

// --- overlay drawing -------------------------------------------------------

using Rgb = std::array<std::uint8_t, 3>;

void put(Image& img, int row, int col, Rgb c) {
  if (row < 0 || col < 0 || row >= img.height || col >= img.width) return;
  const std::size_t i = (static_cast<std::size_t>(row) * img.width + col) * 3;
  for (int k = 0; k < 3; ++k) img.samples[i + k] = c[k];
}

void line(Image& img, Vec2 a, Vec2 b, Rgb c) {  // pixel units, x = col, y = row
  const double len = std::max(norm(b - a), 1e-9);
  const int steps = static_cast<int>(std::ceil(len * 2));
  for (int s = 0; s <= steps; ++s) {
    const Vec2 p = a + (b - a) * (static_cast<double>(s) / steps);
    put(img, static_cast<int>(std::floor(p.y)), static_cast<int>(std::floor(p.x)), c);
  }
}

void cross(Image& img, Vec2 p, int r, Rgb c) {
  line(img, p - Vec2{static_cast<double>(r), 0}, p + Vec2{static_cast<double>(r), 0}, c);
  line(img, p - Vec2{0, static_cast<double>(r)}, p + Vec2{0, static_cast<double>(r)}, c);
}

void dot(Image& img, Vec2 p, Rgb c) {
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc)
      put(img, static_cast<int>(std::floor(p.y)) + dr, static_cast<int>(std::floor(p.x)) + dc, c);
}

// 5x7 glyphs for the characters of the failure-reason names.
const std::map<char, std::array<std::uint8_t, 7>>& glyphs() {
  static const std::map<char, std::array<std::uint8_t, 7>> g{
      {'a', {0x00, 0x00, 0x0e, 0x01, 0x0f, 0x11, 0x0f}}, {'b', {0x10, 0x10, 0x16, 0x19, 0x11, 0x11, 0x1e}},
      {'c', {0x00, 0x00, 0x0e, 0x10, 0x10, 0x11, 0x0e}}, {'d', {0x01, 0x01, 0x0d, 0x13, 0x11, 0x11, 0x0f}},
      {'e', {0x00, 0x00, 0x0e, 0x11, 0x1f, 0x10, 0x0e}}, {'f', {0x06, 0x09, 0x08, 0x1c, 0x08, 0x08, 0x08}},
      {'h', {0x10, 0x10, 0x16, 0x19, 0x11, 0x11, 0x11}}, {'i', {0x04, 0x00, 0x0c, 0x04, 0x04, 0x04, 0x0e}},
      {'j', {0x02, 0x00, 0x06, 0x02, 0x02, 0x12, 0x0c}}, {'n', {0x00, 0x00, 0x16, 0x19, 0x11, 0x11, 0x11}},
      {'o', {0x00, 0x00, 0x0e, 0x11, 0x11, 0x11, 0x0e}}, {'r', {0x00, 0x00, 0x16, 0x19, 0x10, 0x10, 0x10}},
      {'s', {0x00, 0x00, 0x0e, 0x10, 0x0e, 0x01, 0x1e}}, {'t', {0x08, 0x08, 0x1c, 0x08, 0x08, 0x09, 0x06}},
      {'u', {0x00, 0x00, 0x11, 0x11, 0x11, 0x13, 0x0d}}, {'x', {0x00, 0x00, 0x11, 0x0a, 0x04, 0x0a, 0x11}},
      {'-', {0x00, 0x00, 0x00, 0x1f, 0x00, 0x00, 0x00}},
  };
  return g;
}

void text(Image& img, int row, int col, std::string_view s, Rgb c) {
  for (char ch : s) {
    auto it = glyphs().find(ch);
    if (it != glyphs().end())
      for (int r = 0; r < 7; ++r)
        for (int k = 0; k < 5; ++k)
          if (it->second[r] & (0x10 >> k)) put(img, row + r, col + k, c);
    col += 6;
  }
}

void check_grid(const Image& image, const char* what) {
  if (image.width != kGridSize || image.height != kGridSize || image.channels != 1)
    throw InvalidArgument(std::string(what) + " image must be single-channel " + std::to_string(kGridSize) + "x" +
                          std::to_string(kGridSize) + ", got " + std::to_string(image.width) + "x" +
                          std::to_string(image.height) + "x" + std::to_string(image.channels));
}

}  // namespace

void write_png(const fs::path& path, const Image& image) {
  if (image.width < 1 || image.height < 1 || (image.channels != 1 && image.channels != 3) ||
      (image.bit_depth != 8 && image.bit_depth != 16) ||
      image.samples.size() != static_cast<std::size_t>(image.width) * image.height * image.channels)
    throw InvalidArgument("write_png: inconsistent image");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  File f(std::fopen(path.string().c_str(), "wb"));
  if (!f) throw Error("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_write_struct(p, i); }
  } guard{&png, &info};
  png_init_io(png, f.get());
  png_set_IHDR(png, info, image.width, image.height, image.bit_depth,
               image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  std::vector<png_text> texts;
  for (const auto& [k, v] : image.text) {
    png_text t{};
    t.compression = PNG_TEXT_COMPRESSION_NONE;
    t.key = const_cast<char*>(k.c_str());
    t.text = const_cast<char*>(v.c_str());
    texts.push_back(t);
  }
  if (!texts.empty()) png_set_text(png, info, texts.data(), static_cast<int>(texts.size()));
  png_write_info(png, info);
  const std::size_t row_samples = static_cast<std::size_t>(image.width) * image.channels;
  std::vector<png_byte> row(row_samples * (image.bit_depth / 8));
  for (int r = 0; r < image.height; ++r) {
    for (std::size_t i = 0; i < row_samples; ++i) {
      const std::uint16_t v = image.samples[r * row_samples + i];
      if (image.bit_depth == 8) {
        row[i] = static_cast<png_byte>(v);
      } else {  // PNG stores 16-bit samples big-endian
        row[2 * i] = static_cast<png_byte>(v >> 8);
        row[2 * i + 1] = static_cast<png_byte>(v & 0xff);
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
}

Image read_png(const fs::path& path) {
  File f(std::fopen(path.string().c_str(), "rb"));
  if (!f) throw InvalidArgument("cannot read image " + path.string());
  png_byte sig[8];
  if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw InvalidArgument(path.string() + " is not a PNG file");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_read_struct(p, i, nullptr); }
  } guard{&png, &info};
  png_init_io(png, f.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  Image img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.bit_depth = png_get_bit_depth(png, info);
  img.channels = png_get_channels(png, info);
  if (img.channels != 1 && img.channels != 3) throw FormatError("unsupported PNG channel layout");
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  std::vector<png_byte> row(rowbytes);
  const std::size_t row_samples = static_cast<std::size_t>(img.width) * img.channels;
  img.samples.resize(row_samples * img.height);
  for (int r = 0; r < img.height; ++r) {
    png_read_row(png, row.data(), nullptr);
    for (std::size_t i = 0; i < row_samples; ++i)
      img.samples[r * row_samples + i] =
          img.bit_depth == 16 ? static_cast<std::uint16_t>((row[2 * i] << 8) | row[2 * i + 1]) : row[i];
  }
  png_read_end(png, info);
  png_textp texts = nullptr;
  int count = 0;
  if (png_get_text(png, info, &texts, &count) > 0)
    for (int i = 0; i < count; ++i) img.text[texts[i].key] = texts[i].text;
  return img;
}

Image mask_image(const Observation& obs) {
  Image img{kGridSize, kGridSize, 1, 8, {}, {}};
  img.samples.resize(obs.mask.size());
  for (std::size_t i = 0; i < obs.mask.size(); ++i) img.samples[i] = obs.mask[i] ? 255 : 0;
  return img;
}

Image depth_image(const Observation& obs) {
  Image img{kGridSize, kGridSize, 1, 16, {}, {}};
  img.samples.resize(obs.depth.size());
  for (std::size_t i = 0; i < obs.depth.size(); ++i)
    img.samples[i] = static_cast<std::uint16_t>(std::clamp(std::lround(obs.depth[i] / kDepthUnit), 0L, 65535L));
  return img;
}

Image color_image(const Observation& obs) {
  Image img{kGridSize, kGridSize, 3, 8, {}, {}};
  const std::size_t plane = static_cast<std::size_t>(kGridSize) * kGridSize;
  img.samples.resize(plane * 3);
  for (std::size_t i = 0; i < plane; ++i)
    for (int c = 0; c < 3; ++c)
      img.samples[i * 3 + c] = static_cast<std::uint16_t>(std::lround(std::clamp(obs.color[c * plane + i], 0.0f, 1.0f) * 255.0f));
  return img;
}

void dump_observation(const fs::path& dir, const std::string& episode, const Observation& obs) {
  write_png(dir / (episode + "_c.png"), color_image(obs));
  write_png(dir / (episode + "_d.png"), depth_image(obs));
  write_png(dir / (episode + "_g.png"), mask_image(obs));
}

std::vector<std::uint8_t> mask_from_image(const Image& image) {
  check_grid(image, "mask");
  std::vector<std::uint8_t> m(image.samples.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = image.samples[i] > 0 ? 1 : 0;
  return m;
}

std::vector<double> depth_from_image(const Image& image) {
  check_grid(image, "depth");
  std::vector<double> d(image.samples.size());
  const double scale = image.bit_depth == 16 ? kDepthUnit : kDepthUnit * 257.0;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = image.samples[i] * scale;
  return d;
}

Image render_overlay(std::span<const std::uint8_t> mask, std::span<const double> depth, const GraspPlan& plan) {
  const std::size_t n = static_cast<std::size_t>(kGridSize) * kGridSize;
  if (mask.size() != n || depth.size() != n) throw InvalidArgument("overlay needs 224x224 mask and depth");
  Image img{kGridSize, kGridSize, 3, 8, {}, {}};
  img.samples.assign(n * 3, 128);
  const double top = std::max(*std::max_element(depth.begin(), depth.end()), 1e-6);
  for (std::size_t i = 0; i < n; ++i)
    if (mask[i]) {
      const auto v = static_cast<std::uint16_t>(60 + std::lround(160.0 * depth[i] / top));
      img.samples[i * 3] = img.samples[i * 3 + 1] = img.samples[i * 3 + 2] = v;
    }

  const Vec2 main{plan.main.pixel.col + 0.5, plan.main.pixel.row + 0.5};
  const Rgb red{230, 40, 40}, yellow{250, 220, 40}, blue{40, 110, 240}, green{40, 200, 90};
  if (plan.valid) {
    const double a = plan.axis_deg * 3.14159265358979323846 / 180.0;
    const Vec2 dir{std::cos(a), std::sin(a)};
    line(img, main - dir * 320.0, main + dir * 320.0, yellow);
    int k = 0;
    for (const GraspSide* s : {&plan.side_a, &plan.side_b}) {
      const Rgb c = k++ == 0 ? blue : green;
      for (const Vec2& p : s->points) dot(img, p / kCellSize, c);
      const Vec2 contact = s->contact / kCellSize;
      line(img, contact, contact + s->inward_normal * 12.0, c);
    }
  } else {
    const std::string_view reason = failure_reason_name(plan.failure_reason);
    text(img, 4, 4, reason, red);
    img.text["failure_reason"] = std::string(reason);
  }
  cross(img, main, 4, red);
  img.text["valid"] = plan.valid ? "true" : "false";
  return img;
}

}  // namespace flatgrasp
