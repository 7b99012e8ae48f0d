#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flatgrasp/checkpoint.hpp"
#include "flatgrasp/config.hpp"
#include "flatgrasp/env.hpp"

namespace flatgrasp {

struct UpdateMetrics {
  std::uint64_t episode = 0;  // episodes completed after this update
  std::uint64_t update = 0;
  double batch_success = 0.0;
  double trailing_success = 0.0;
  LossStats loss;
  std::optional<double> eval_success;
};

nlohmann::json to_json(const UpdateMetrics& m);

struct TrainOptions {
  std::optional<std::filesystem::path> resume;  // checkpoint to continue from
  bool write_files = true;                      // false: in-memory only (tests)
  std::function<void(const UpdateMetrics&)> on_update;
};

struct TrainResult {
  std::unique_ptr<Agent> agent;
  TrainState state;
  std::vector<UpdateMetrics> metrics;  // this invocation only
  std::filesystem::path final_checkpoint;
};

// Rollout/update loop to config.total_episodes. Writes config.json,
// metrics.jsonl, periodic checkpoint_<episode>.fgsp and final.fgsp into
// config.output_dir. Episode i always uses episode_seed(config.seed, i), so a
// resumed run continues exactly as an uninterrupted one would.
TrainResult train(const RunConfig& config, const TrainOptions& options = {});

// Same loop over an arbitrary episode source (e.g. the bandit test bed),
// without files.
TrainResult train_on(const EpisodeSource& source, const RunConfig& config,
                     const std::function<void(const UpdateMetrics&)>& on_update = {});

struct ObjectResult {
  std::string id;
  ObjectModel object;
  int runs = 0;
  int successes = 0;
  double mean_percent = 0.0;
};

struct EvalReport {
  std::vector<ObjectResult> objects;
  double all_percent = 0.0;  // unweighted mean over objects
  std::string config_hash;
  std::string checkpoint_id;
  std::uint64_t seed = 0;
};

struct EvalOptions {
  int runs = 30;
  std::uint64_t seed = 0;
  int workers = 1;
};

// Greedy policy; run r of object k uses episode index k * runs + r.
EvalReport evaluate_policy(const PolicySnapshot& snapshot, const EnvConfig& env,
                           const std::vector<ObjectModel>& objects, const EvalOptions& options,
                           std::vector<EpisodeRecord>* records = nullptr);

nlohmann::json to_json(const EvalReport& report);
// Aligned table: header row of object ids plus "All", one row of mean %.
std::string format_table(const EvalReport& report, const std::string& row_label = "Ours");

// 2x2 grid {fixed, adaptive} x {shared, independent} from one base config.
struct AblationVariant {
  std::string key;    // directory name, e.g. "fixed-shared"
  std::string label;  // e.g. "Fixed Backbone + Shared AC"
  BackboneMode backbone;
  AcMode ac;
};
const std::vector<AblationVariant>& ablation_variants();

struct AblationResult {
  struct Entry {
    AblationVariant variant;
    double final_trailing_success = 0.0;
    std::vector<UpdateMetrics> curve;
    std::filesystem::path output_dir;
  };
  std::vector<Entry> entries;
};

AblationResult run_ablation(const RunConfig& base, const TrainOptions& options = {});
nlohmann::json to_json(const AblationResult& result);
std::string format_ablation_table(const AblationResult& result);

}  // namespace flatgrasp
