#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "flatgrasp/backbone.hpp"
#include "flatgrasp/policy.hpp"
#include "flatgrasp/ppo.hpp"

namespace flatgrasp {

inline constexpr std::uint32_t kSnapshotVersion = 1;

// Immutable copy of every network weight, handed to rollout workers.
struct PolicySnapshot {
  std::uint32_t version = kSnapshotVersion;
  BackboneConfig backbone_config;
  PolicyConfig policy_config;
  std::vector<float> backbone_params;
  std::vector<float> policy_params;
};

// Read-only networks rebuilt from a snapshot; safe to share across threads.
class InferenceModel {
 public:
  explicit InferenceModel(const PolicySnapshot& snapshot);

  nn::Volume<float> features(std::span<const float> color) const { return backbone_.extract(color); }
  PolicyOutput<float> forward(const nn::Volume<float>& features) const { return policy_.forward(features); }

 private:
  Backbone<float> backbone_;
  PolicyNetwork<float> policy_;
};

struct LossStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double grad_norm = 0.0;  // pre-clip, mean over minibatches
  int minibatches = 0;
};

// Networks plus optimizer state: the single writer during training.
class Agent {
 public:
  Agent(const BackboneConfig& backbone, const PolicyConfig& policy, const PPOConfig& ppo);

  const Backbone<float>& backbone() const { return backbone_; }
  const PolicyNetwork<float>& policy() const { return policy_; }
  const PPOConfig& ppo_config() const { return ppo_; }
  Backbone<float>& backbone() { return backbone_; }
  PolicyNetwork<float>& policy() { return policy_; }
  Adam& policy_optimizer() { return policy_opt_; }
  Adam& backbone_optimizer() { return backbone_opt_; }
  const Adam& policy_optimizer() const { return policy_opt_; }
  const Adam& backbone_optimizer() const { return backbone_opt_; }

  std::shared_ptr<const PolicySnapshot> snapshot() const;
  // Throws FormatError on version or architecture mismatch.
  void restore(const PolicySnapshot& snapshot);

 private:
  Backbone<float> backbone_;
  PolicyNetwork<float> policy_;
  PPOConfig ppo_;
  Adam policy_opt_;
  Adam backbone_opt_;
};

bool same_architecture(const BackboneConfig& a, const BackboneConfig& b);
bool same_architecture(const PolicyConfig& a, const PolicyConfig& b);

// Clipped-surrogate update over one batch of transitions. Per-sample
// gradients are reduced in sample order, so the result does not depend on
// `workers`. Throws InvalidArgument for an empty/short batch and
// NumericalFailure (parameters untouched) if the loss or gradient goes
// non-finite.
LossStats ppo_update(Agent& agent, std::span<const Transition> batch, const PPOConfig& config, std::uint64_t seed,
                     int workers = 1);

}  // namespace flatgrasp
