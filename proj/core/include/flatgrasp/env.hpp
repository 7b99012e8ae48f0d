#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "flatgrasp/agent.hpp"
#include "flatgrasp/decoder.hpp"
#include "flatgrasp/outcome.hpp"
#include "flatgrasp/world.hpp"

namespace flatgrasp {

struct EnvConfig {
  std::vector<Family> pool = training_families();
  std::uint64_t seed = 0;
  bool evaluation = false;  // greedy actions
  int mc_trials = 0;        // overrides GraspParams::mc_trials
  ObjectBounds bounds;
  DecoderParams decoder;
  GraspParams grasp;
};

void validate(const EnvConfig& config);

// Append-only account of one single-step episode.
struct EpisodeRecord {
  std::uint64_t episode = 0;
  std::uint64_t seed = 0;
  ObjectModel object;  // manifest entry: family, seed, dims (plus the generated geometry)
  Pose2D pose;
  int action = 0;
  MainPoint main;
  GraspPlan plan;
  GraspOutcome outcome;
  int reward = 0;
  double duration_ms = 0.0;  // wall clock, never part of metrics
};

// A posed object and its heightmaps.
struct EnvState {
  Scene scene;
  Observation observation;
  SideMetadata sides;
};

class Env {
 public:
  explicit Env(EnvConfig config);

  const EnvConfig& config() const { return config_; }

  // Family drawn uniformly from the pool, then object and pose; all from `seed`.
  const Observation& reset(std::uint64_t seed);
  // Fixed object (eval manifests); only the pose comes from `seed`.
  const Observation& reset(const ObjectModel& object, std::uint64_t seed);
  // Explicit posed scene; `seed` only feeds Monte Carlo contact noise.
  const Observation& reset(const Scene& scene, std::uint64_t seed = 0);

  bool active() const { return state_.has_value(); }
  const EnvState& state() const;

  struct StepResult {
    int reward = 0;
    EpisodeRecord record;
    bool done = true;
  };
  // Decode -> evaluate -> reward. Ends the episode.
  StepResult step(int action);

 private:
  EnvConfig config_;
  std::optional<EnvState> state_;
  std::uint64_t seed_ = 0;
};

// Reset + act + step for one episode. Provided by the caller of rollout so
// that the same loop drives the grasp environment and simpler test beds.
struct EpisodeResult {
  Transition transition;
  EpisodeRecord record;
};

class EpisodeSource {
 public:
  virtual ~EpisodeSource() = default;
  // Must be safe to call concurrently for different indices.
  virtual EpisodeResult run(const InferenceModel& model, std::uint64_t seed, std::uint64_t index,
                            bool greedy) const = 0;
};

// Training/eval episodes on freshly sampled objects from the env pool.
class GraspSource final : public EpisodeSource {
 public:
  explicit GraspSource(EnvConfig config, bool keep_color = true);
  EpisodeResult run(const InferenceModel& model, std::uint64_t seed, std::uint64_t index,
                    bool greedy) const override;

 private:
  EnvConfig config_;
  bool keep_color_;
};

// Repeated runs on fixed objects (eval manifests): episode i uses
// objects[i / runs_per_object].
class ObjectSetSource final : public EpisodeSource {
 public:
  ObjectSetSource(EnvConfig config, std::vector<ObjectModel> objects, int runs_per_object);
  EpisodeResult run(const InferenceModel& model, std::uint64_t seed, std::uint64_t index,
                    bool greedy) const override;

 private:
  EnvConfig config_;
  std::vector<ObjectModel> objects_;
  std::size_t runs_;
};

// One frozen scene; reward 1 iff the action is inside a square block of
// feature cells (side `region_size`) centred on the object's centroid cell.
class BanditSource final : public EpisodeSource {
 public:
  BanditSource(std::uint64_t scene_seed, Family family, int region_size = 3);
  EpisodeResult run(const InferenceModel& model, std::uint64_t seed, std::uint64_t index,
                    bool greedy) const override;

  const Scene& scene() const { return scene_; }
  bool rewarded(int action) const;
  Cell region_centre() const { return centre_; }

 private:
  Scene scene_;
  std::shared_ptr<const std::vector<float>> color_;
  Cell centre_;
  int half_;
};

// Picks the action for an observation: argmax when greedy, otherwise a draw
// seeded by `seed`. Fills action/log_prob/value/features of the transition.
Transition act(const InferenceModel& model, std::span<const float> color, std::uint64_t seed, bool greedy);

// Per-episode seed for episode `index` of a rollout seeded with `seed`.
std::uint64_t episode_seed(std::uint64_t seed, std::uint64_t index);

struct RolloutBatch {
  std::vector<Transition> transitions;
  std::vector<EpisodeRecord> records;
};

// N episodes against one immutable snapshot; episode i uses
// episode_seed(seed, first_index + i). Output ordered by index regardless of
// how the work is spread over `workers`.
RolloutBatch rollout(const EpisodeSource& source, const PolicySnapshot& snapshot, std::size_t n, std::uint64_t seed,
                     int workers, bool greedy, std::uint64_t first_index = 0);

}  // namespace flatgrasp
