#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flatgrasp/agent.hpp"
#include "flatgrasp/env.hpp"

namespace flatgrasp {

// Everything one training run needs. Serialized as a single JSON document;
// missing keys take the defaults below, unknown keys are rejected.
struct RunConfig {
  std::uint64_t seed = 0;
  std::uint64_t total_episodes = 50000;
  std::uint64_t eval_every = 0;       // episodes between in-training greedy evals; 0 = off
  std::uint64_t eval_episodes = 120;  // episodes per in-training eval
  std::uint64_t checkpoint_every = 10000;
  int trailing_window = 500;
  int workers = 1;
  bool record_episodes = false;       // write episodes.jsonl
  std::string output_dir = "runs/default";
  EnvConfig env;
  BackboneConfig backbone;
  PolicyConfig policy;
  PPOConfig ppo;
};

// Throws InvalidArgument on any schema violation.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);
void validate(const RunConfig& config);

RunConfig load_run_config(const std::filesystem::path& path);

// Network seeds are mixed with the run seed so that different run seeds give
// different initial weights while a shared seed gives identical ones.
BackboneConfig effective_backbone(const RunConfig& config);
PolicyConfig effective_policy(const RunConfig& config);

// Family lists accept tags and the group names "training", "beveled",
// "irregular", "household", "all".
std::vector<Family> parse_family_list(const nlohmann::json& j);

nlohmann::json to_json(const ObjectModel& object, bool with_geometry = false);
nlohmann::json to_json(const GraspPlan& plan);
nlohmann::json to_json(const GraspOutcome& outcome);
nlohmann::json to_json(const EpisodeRecord& record);

// Object-set manifest: JSON array of {family, seed, dims}. Loading
// regenerates each object and checks the recorded dims still match.
nlohmann::json manifest_json(const std::vector<ObjectModel>& objects);
std::vector<ObjectModel> objects_from_manifest(const nlohmann::json& manifest, const ObjectBounds& bounds = {});
std::vector<ObjectModel> load_manifest(const std::filesystem::path& path, const ObjectBounds& bounds = {});
std::vector<ObjectModel> generate_object_set(const std::vector<Family>& families, int count, std::uint64_t seed,
                                             const ObjectBounds& bounds = {});

// JSONL streams start with a schema header line.
inline constexpr int kMetricsSchemaVersion = 1;
inline constexpr int kRecordSchemaVersion = 1;
nlohmann::json metrics_header();
nlohmann::json records_header();

// Compact single-line JSON; identical values give identical bytes.
std::string dump_line(const nlohmann::json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace flatgrasp
