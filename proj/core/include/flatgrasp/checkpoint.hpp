#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "flatgrasp/agent.hpp"
#include "flatgrasp/config.hpp"

namespace flatgrasp {

// "FGSP" checkpoint layout: 4 magic bytes, u32 format version, u32 JSON blob
// length, the blob (config, architecture, training state, array table), then
// little-endian f32 arrays in declaration order, then a CRC32 of everything
// before it. All integers little-endian.
inline constexpr char kCheckpointMagic[4] = {'F', 'G', 'S', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct TrainState {
  std::uint64_t episode = 0;  // episodes completed
  std::uint64_t update = 0;   // PPO updates completed
  std::vector<int> window;    // trailing rewards, oldest first
};

struct Checkpoint {
  RunConfig config;
  TrainState state;
  std::unique_ptr<Agent> agent;
};

std::vector<std::uint8_t> encode_checkpoint(const Agent& agent, const RunConfig& config, const TrainState& state);
// Throws FormatError on bad magic, version, CRC, size or architecture.
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const Agent& agent, const RunConfig& config,
                     const TrainState& state);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// CRC32 (zlib polynomial) of a byte range, hex-formatted helpers for reports.
std::uint32_t crc32_of(std::span<const std::uint8_t> bytes);
std::string hex32(std::uint32_t value);

}  // namespace flatgrasp
