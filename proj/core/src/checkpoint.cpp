#include "flatgrasp/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "flatgrasp/error.hpp"

namespace flatgrasp {

using nlohmann::json;

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

void put_floats(std::vector<std::uint8_t>& out, std::span<const float> values) {
  for (float f : values) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

json config_json(const BackboneConfig& b) {
  return {{"mode", backbone_mode_name(b.mode)}, {"channels", b.channels}, {"seed", b.seed},
          {"strides", b.strides}, {"input_size", b.input_size}};
}

json config_json(const PolicyConfig& p) {
  return {{"ac_mode", ac_mode_name(p.ac_mode)}, {"feature_channels", p.feature_channels},
          {"hidden_channels", p.hidden_channels}, {"trunk_dilation", p.trunk_dilation},
          {"map_size", p.map_size}, {"seed", p.seed}, {"actor_head_gain", p.actor_head_gain}};
}

BackboneConfig backbone_from(const json& j) {
  BackboneConfig b;
  b.mode = parse_backbone_mode(j.at("mode").get<std::string>());
  b.channels = j.at("channels").get<int>();
  b.seed = j.at("seed").get<std::uint64_t>();
  b.strides = j.at("strides").get<std::array<int, 3>>();
  b.input_size = j.at("input_size").get<int>();
  return b;
}

PolicyConfig policy_from(const json& j) {
  PolicyConfig p;
  p.ac_mode = parse_ac_mode(j.at("ac_mode").get<std::string>());
  p.feature_channels = j.at("feature_channels").get<int>();
  p.hidden_channels = j.at("hidden_channels").get<int>();
  p.trunk_dilation = j.at("trunk_dilation").get<std::array<int, 2>>();
  p.map_size = j.at("map_size").get<int>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.actor_head_gain = j.at("actor_head_gain").get<double>();
  return p;
}

struct ArrayRef {
  const char* name;
  std::span<const float> values;
};

}  // namespace

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  std::size_t done = 0;
  while (done < bytes.size()) {
    const uInt chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - done, 1u << 30));
    crc = ::crc32(crc, bytes.data() + done, chunk);
    done += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string hex32(std::uint32_t value) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", value);
  return buf;
}

std::vector<std::uint8_t> encode_checkpoint(const Agent& agent, const RunConfig& config, const TrainState& state) {
  const ArrayRef arrays[] = {
      {"backbone.params", agent.backbone().params()},
      {"policy.params", agent.policy().params()},
      {"backbone.adam.m", agent.backbone_optimizer().first_moment()},
      {"backbone.adam.v", agent.backbone_optimizer().second_moment()},
      {"policy.adam.m", agent.policy_optimizer().first_moment()},
      {"policy.adam.v", agent.policy_optimizer().second_moment()},
  };
  json table = json::array();
  for (const ArrayRef& a : arrays) table.push_back({{"name", a.name}, {"count", a.values.size()}});
  const json blob = {
      {"config", to_json(config)},
      {"architecture", {{"backbone", config_json(agent.backbone().config())},
                        {"policy", config_json(agent.policy().config())}}},
      {"state", {{"episode", state.episode}, {"update", state.update}, {"window", state.window}}},
      {"adam", {{"backbone_steps", agent.backbone_optimizer().steps()},
                {"policy_steps", agent.policy_optimizer().steps()}}},
      {"arrays", table},
  };
  const std::string text = blob.dump();

  std::vector<std::uint8_t> out(std::begin(kCheckpointMagic), std::end(kCheckpointMagic));
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (const ArrayRef& a : arrays) put_floats(out, a.values);
  put_u32(out, crc32_of(out));
  return out;
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0)
    throw FormatError("not a checkpoint (bad magic)");
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kCheckpointVersion)
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  const std::size_t body = bytes.size() - 4;
  if (crc32_of(bytes.first(body)) != get_u32(bytes, body)) throw FormatError("checkpoint CRC mismatch");
  const std::size_t blob_len = get_u32(bytes, 8);
  if (12 + blob_len > body) throw FormatError("checkpoint truncated (config blob)");

  Checkpoint ck;
  json blob;
  try {
    blob = json::parse(bytes.begin() + 12, bytes.begin() + 12 + static_cast<std::ptrdiff_t>(blob_len));
    ck.config = run_config_from_json(blob.at("config"));
    const json& arch = blob.at("architecture");
    const json& st = blob.at("state");
    ck.state.episode = st.at("episode").get<std::uint64_t>();
    ck.state.update = st.at("update").get<std::uint64_t>();
    ck.state.window = st.at("window").get<std::vector<int>>();
    ck.agent = std::make_unique<Agent>(backbone_from(arch.at("backbone")), policy_from(arch.at("policy")),
                                       ck.config.ppo);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed checkpoint header: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("checkpoint config rejected: ") + e.what());
  }

  std::size_t at = 12 + blob_len;
  auto take = [&](const json& entry, const char* name, std::size_t expected) {
    if (entry.at("name").get<std::string>() != name || entry.at("count").get<std::size_t>() != expected)
      throw FormatError(std::string("checkpoint array ") + name + " does not match the architecture");
    if (at + 4 * expected > body) throw FormatError("checkpoint truncated (arrays)");
    std::vector<float> v(expected);
    for (std::size_t i = 0; i < expected; ++i) v[i] = std::bit_cast<float>(get_u32(bytes, at + 4 * i));
    at += 4 * expected;
    return v;
  };
  Agent& agent = *ck.agent;
  const json& table = blob.at("arrays");
  if (!table.is_array() || table.size() != 6) throw FormatError("checkpoint array table malformed");
  const std::size_t nb = agent.backbone().param_count(), np = agent.policy().param_count();
  const auto bp = take(table[0], "backbone.params", nb);
  const auto pp = take(table[1], "policy.params", np);
  const auto bm = take(table[2], "backbone.adam.m", nb);
  const auto bv = take(table[3], "backbone.adam.v", nb);
  const auto pm = take(table[4], "policy.adam.m", np);
  const auto pv = take(table[5], "policy.adam.v", np);
  if (at != body) throw FormatError("checkpoint has trailing bytes");
  agent.backbone().load_params(bp);
  agent.policy().load_params(pp);
  const json& adam = blob.at("adam");
  agent.backbone_optimizer().load(bm, bv, adam.at("backbone_steps").get<std::uint64_t>());
  agent.policy_optimizer().load(pm, pv, adam.at("policy_steps").get<std::uint64_t>());
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Agent& agent, const RunConfig& config,
                     const TrainState& state) {
  const auto bytes = encode_checkpoint(agent, config, state);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read checkpoint " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace flatgrasp
