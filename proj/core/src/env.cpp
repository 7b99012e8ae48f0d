#include "flatgrasp/env.hpp"

#include <chrono>

#include "flatgrasp/distribution.hpp"
#include "flatgrasp/error.hpp"
#include "flatgrasp/parallel.hpp"
#include "flatgrasp/rng.hpp"

namespace flatgrasp {

namespace {

constexpr std::uint64_t kFamilyStream = 0xfa31;
constexpr std::uint64_t kObjectStream = 0x0b1e;
constexpr std::uint64_t kPoseStream = 0x9053;
constexpr std::uint64_t kActionStream = 0xac70;
constexpr std::uint64_t kNoiseStream = 0x4015e;

GraspParams effective_grasp(const EnvConfig& c, std::uint64_t seed) {
  GraspParams p = c.grasp;
  p.mc_trials = c.mc_trials;
  p.mc_seed = hash_seed(seed, {kNoiseStream});
  return p;
}

EpisodeRecord run_step(const EnvConfig& config, const EnvState& state, std::uint64_t seed, int action) {
  if (action < 0 || action >= kActionCount) throw InvalidArgument("action index out of range");
  EpisodeRecord rec;
  rec.seed = seed;
  rec.object = state.scene.object;
  rec.pose = state.scene.pose;
  rec.action = action;
  rec.main = main_point(action);
  rec.plan = decode(rec.main.feature_cell, state.observation.mask, state.observation.depth, &state.sides,
                    config.decoder);
  rec.outcome = evaluate(rec.plan, state.scene, effective_grasp(config, seed));
  rec.reward = reward(rec.outcome);
  return rec;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

EnvState make_state(const ObjectModel& object, std::uint64_t seed) {
  EnvState s;
  s.scene.object = object;
  s.scene.pose = sample_pose(object, hash_seed(seed, {kPoseStream}));
  s.observation = rasterize(s.scene);
  s.sides = side_metadata(s.scene);
  return s;
}

ObjectModel sample_object(const EnvConfig& config, std::uint64_t seed) {
  Rng rng(hash_seed(seed, {kFamilyStream}));
  const Family family = config.pool[rng.below(config.pool.size())];
  return generate_object(family, hash_seed(seed, {kObjectStream}), config.bounds);
}

EpisodeResult grasp_episode(const EnvConfig& config, const EnvState& state, const InferenceModel& model,
                            std::uint64_t seed, std::uint64_t index, bool greedy, bool keep_color,
                            std::chrono::steady_clock::time_point start) {
  EpisodeResult r;
  r.transition = act(model, state.observation.color, seed, greedy);
  r.record = run_step(config, state, seed, r.transition.action);
  r.record.episode = index;
  r.transition.reward = r.record.reward;
  r.transition.episode = index;
  r.transition.seed = seed;
  if (keep_color) r.transition.color = std::make_shared<const std::vector<float>>(state.observation.color);
  r.record.duration_ms = elapsed_ms(start);
  return r;
}

}  // namespace

void validate(const EnvConfig& c) {
  if (c.pool.empty()) throw InvalidArgument("env.pool must not be empty");
  if (c.mc_trials < 0) throw InvalidArgument("env.mc_trials must be >= 0");
  validate(c.grasp);
}

Env::Env(EnvConfig config) : config_(std::move(config)) { validate(config_); }

const Observation& Env::reset(std::uint64_t seed) { return reset(sample_object(config_, seed), seed); }

const Observation& Env::reset(const ObjectModel& object, std::uint64_t seed) {
  state_ = make_state(object, seed);
  seed_ = seed;
  return state_->observation;
}

const Observation& Env::reset(const Scene& scene, std::uint64_t seed) {
  if (!pose_fits(scene.object, scene.pose)) throw PlacementFailure("scene pose does not fit the workspace");
  EnvState s;
  s.scene = scene;
  s.observation = rasterize(scene);
  s.sides = side_metadata(scene);
  state_ = std::move(s);
  seed_ = seed;
  return state_->observation;
}

const EnvState& Env::state() const {
  if (!state_) throw InvalidArgument("environment has no active scene; call reset first");
  return *state_;
}

Env::StepResult Env::step(int action) {
  const auto start = std::chrono::steady_clock::now();
  StepResult r;
  r.record = run_step(config_, state(), seed_, action);
  r.reward = r.record.reward;
  r.record.duration_ms = elapsed_ms(start);
  state_.reset();
  return r;
}

std::uint64_t episode_seed(std::uint64_t seed, std::uint64_t index) { return hash_seed(seed, {index}); }

Transition act(const InferenceModel& model, std::span<const float> color, std::uint64_t seed, bool greedy) {
  Transition t;
  auto features = std::make_shared<nn::Volume<float>>(model.features(color));
  const PolicyOutput<float> out = model.forward(*features);
  if (!nn::all_finite<float>(out.logits) || !std::isfinite(out.value))
    throw NumericalFailure("policy produced non-finite output");
  const ActionSample a = greedy ? greedy_action<float>(out.logits)
                                : sample_action<float>(out.logits, hash_seed(seed, {kActionStream}));
  t.action = a.index;
  t.log_prob = a.log_prob;
  t.value = out.value;
  t.features = std::move(features);
  return t;
}

GraspSource::GraspSource(EnvConfig config, bool keep_color) : config_(std::move(config)), keep_color_(keep_color) {
  validate(config_);
}

EpisodeResult GraspSource::run(const InferenceModel& model, std::uint64_t seed, std::uint64_t index,
                               bool greedy) const {
  const auto start = std::chrono::steady_clock::now();
  const EnvState state = make_state(sample_object(config_, seed), seed);
  return grasp_episode(config_, state, model, seed, index, greedy, keep_color_, start);
}

ObjectSetSource::ObjectSetSource(EnvConfig config, std::vector<ObjectModel> objects, int runs_per_object)
    : config_(std::move(config)), objects_(std::move(objects)), runs_(static_cast<std::size_t>(runs_per_object)) {
  validate(config_);
  if (objects_.empty()) throw InvalidArgument("object set must not be empty");
  if (runs_per_object < 1) throw InvalidArgument("runs per object must be >= 1");
}

EpisodeResult ObjectSetSource::run(const InferenceModel& model, std::uint64_t seed, std::uint64_t index,
                                   bool greedy) const {
  const auto start = std::chrono::steady_clock::now();
  const EnvState state = make_state(objects_.at(index / runs_), seed);
  return grasp_episode(config_, state, model, seed, index, greedy, false, start);
}

BanditSource::BanditSource(std::uint64_t scene_seed, Family family, int region_size) : half_(region_size / 2) {
  if (region_size < 1 || region_size % 2 == 0) throw InvalidArgument("bandit region size must be odd and >= 1");
  const EnvState s = make_state(generate_object(family, hash_seed(scene_seed, {kObjectStream})), scene_seed);
  scene_ = s.scene;
  color_ = std::make_shared<const std::vector<float>>(s.observation.color);
  const Cell pixel = world_to_pixel(scene_.center_of_mass());
  centre_ = {pixel.row / kFeatureStride, pixel.col / kFeatureStride};
}

bool BanditSource::rewarded(int action) const {
  const int r = action / kFeatureSize, c = action % kFeatureSize;
  return std::abs(r - centre_.row) <= half_ && std::abs(c - centre_.col) <= half_;
}

EpisodeResult BanditSource::run(const InferenceModel& model, std::uint64_t seed, std::uint64_t index,
                                bool greedy) const {
  const auto start = std::chrono::steady_clock::now();
  EpisodeResult r;
  r.transition = act(model, *color_, seed, greedy);
  r.transition.reward = rewarded(r.transition.action) ? 1 : 0;
  r.transition.episode = index;
  r.transition.seed = seed;
  r.transition.color = color_;
  r.record.episode = index;
  r.record.seed = seed;
  r.record.object = scene_.object;
  r.record.pose = scene_.pose;
  r.record.action = r.transition.action;
  r.record.main = main_point(r.transition.action);
  r.record.plan.main = r.record.main;
  r.record.outcome.evaluated = true;
  r.record.outcome.success = r.transition.reward == 1;
  r.record.outcome.reward = r.transition.reward;
  r.record.reward = r.transition.reward;
  r.record.duration_ms = elapsed_ms(start);
  return r;
}

RolloutBatch rollout(const EpisodeSource& source, const PolicySnapshot& snapshot, std::size_t n, std::uint64_t seed,
                     int workers, bool greedy, std::uint64_t first_index) {
  RolloutBatch batch;
  if (n == 0) return batch;
  const InferenceModel model(snapshot);
  std::vector<EpisodeResult> results(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const std::uint64_t index = first_index + i;
    results[i] = source.run(model, episode_seed(seed, index), index, greedy);
  });
  batch.transitions.reserve(n);
  batch.records.reserve(n);
  for (auto& r : results) {
    batch.transitions.push_back(std::move(r.transition));
    batch.records.push_back(std::move(r.record));
  }
  return batch;
}

}  // namespace flatgrasp
