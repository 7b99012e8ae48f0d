#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "flatgrasp/decoder.hpp"
#include "flatgrasp/world.hpp"

namespace flatgrasp {

// Decoded PNG: samples are row-major, interleaved, 8- or 16-bit.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;   // 1 = gray, 3 = RGB
  int bit_depth = 8;  // 8 or 16
  std::vector<std::uint16_t> samples;
  std::map<std::string, std::string> text;  // tEXt chunks

  std::uint16_t at(int row, int col, int ch = 0) const {
    return samples[(static_cast<std::size_t>(row) * width + col) * channels + ch];
  }
};

void write_png(const std::filesystem::path& path, const Image& image);
// Gray/RGB(A), 8/16-bit; palette and alpha are expanded/stripped.
Image read_png(const std::filesystem::path& path);

// Depth PNGs store 1 unit = 0.1 mm.
inline constexpr double kDepthUnit = 1e-4;

Image mask_image(const Observation& obs);   // 8-bit, 0 / 255
Image depth_image(const Observation& obs);  // 16-bit
Image color_image(const Observation& obs);  // 8-bit RGB

// Writes <episode>_c.png, <episode>_d.png and <episode>_g.png into dir.
void dump_observation(const std::filesystem::path& dir, const std::string& episode, const Observation& obs);

// Inverse of mask_image / depth_image. Throws InvalidArgument unless the
// image is single-channel 224 x 224.
std::vector<std::uint8_t> mask_from_image(const Image& image);
std::vector<double> depth_from_image(const Image& image);

// Annotated RGB view of a plan: object shaded by depth, main point, cast
// line, both contact clusters and their normals; the failure reason is
// printed when the plan is invalid (and stored as a tEXt chunk).
Image render_overlay(std::span<const std::uint8_t> mask, std::span<const double> depth, const GraspPlan& plan);

}  // namespace flatgrasp
