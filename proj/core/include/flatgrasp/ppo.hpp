#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "flatgrasp/backbone.hpp"
#include "flatgrasp/distribution.hpp"
#include "flatgrasp/policy.hpp"

namespace flatgrasp {

struct PPOConfig {
  double clip_epsilon = 0.2;
  double learning_rate = 3e-4;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  int epochs = 4;
  int batch_size = 64;      // episodes per update
  int minibatch_size = 16;
  double max_grad_norm = 0.5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  bool normalize_advantage = true;
};

void validate(const PPOConfig& config);

// One single-step episode as seen by the learner.
struct Transition {
  std::shared_ptr<const std::vector<float>> color;        // 3 x 224 x 224, kept for adaptive backbones
  std::shared_ptr<const nn::Volume<float>> features;      // backbone output at rollout time
  int action = 0;
  double log_prob = 0.0;
  double value = 0.0;
  int reward = 0;
  std::uint64_t episode = 0;
  std::uint64_t seed = 0;
};

// Single-step episodes: A = R - V(s), critic target is R itself.
inline double advantage(const Transition& t) { return static_cast<double>(t.reward) - t.value; }

// Zero-mean, unit (population) std; std is floored at 1e-8.
std::vector<double> normalized_advantages(std::span<const Transition> batch, bool normalize = true);

struct SampleTerms {
  double policy_loss = 0.0;   // -min(r A, clip(r) A)
  double value_loss = 0.0;    // (V - R)^2
  double entropy = 0.0;
  double ratio = 1.0;
  double log_prob = 0.0;
  bool clipped = false;       // |r - 1| > eps
};

// PPO terms for one transition plus d(scale * total)/d(logits) and /d(value),
// total = policy + c_v * value - c_e * entropy.
template <typename T>
SampleTerms ppo_terms(std::span<const T> logits, T value, int action, double old_log_prob, double adv, double target,
                      const PPOConfig& cfg, double scale, std::span<T> grad_logits, T& grad_value) {
  const Categorical<T> dist(logits);
  SampleTerms s;
  s.log_prob = dist.log_probs[static_cast<std::size_t>(action)];
  s.ratio = std::exp(s.log_prob - old_log_prob);
  const double eps = cfg.clip_epsilon;
  const double clipped_ratio = std::min(std::max(s.ratio, 1.0 - eps), 1.0 + eps);
  const double surr1 = s.ratio * adv, surr2 = clipped_ratio * adv;
  s.policy_loss = -std::min(surr1, surr2);
  s.clipped = std::abs(s.ratio - 1.0) > eps;
  s.entropy = dist.entropy;
  const double v = static_cast<double>(value);
  s.value_loss = (v - target) * (v - target);

  // Only the unclipped branch carries gradient.
  const double d_logp = surr1 <= surr2 ? -adv * s.ratio : 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    const double p = dist.prob(j);
    double g = -d_logp * p + cfg.entropy_coef * p * (dist.log_probs[j] + dist.entropy);
    if (static_cast<int>(j) == action) g += d_logp;
    grad_logits[j] = static_cast<T>(scale * g);
  }
  grad_value = static_cast<T>(scale * 2.0 * cfg.value_coef * (v - target));
  return s;
}

// Inputs of one transition for the gradient routine.
template <typename T>
struct SampleInput {
  std::span<const T> color;              // used when the backbone is trainable
  const nn::Volume<T>* features = nullptr;  // used otherwise
  int action = 0;
  double old_log_prob = 0.0;
  double advantage = 0.0;
  double target = 0.0;
};

// Forward + backward for one transition. Gradients of scale * loss are
// accumulated into grad_policy and, for a trainable backbone, grad_backbone.
template <typename T>
SampleTerms sample_gradient(const Backbone<T>& backbone, const PolicyNetwork<T>& policy, const SampleInput<T>& in,
                            const PPOConfig& cfg, double scale, std::span<T> grad_policy, std::span<T> grad_backbone) {
  const bool adapt = backbone.trainable();
  typename Backbone<T>::Tape btape;
  nn::Volume<T> computed;
  const nn::Volume<T>* features = in.features;
  if (adapt || !features) {
    computed = backbone.extract(in.color, adapt ? &btape : nullptr);
    features = &computed;
  }
  typename PolicyNetwork<T>::Tape tape;
  const PolicyOutput<T> out = policy.forward(*features, &tape);
  std::vector<T> grad_logits(out.logits.size());
  T grad_value{};
  const SampleTerms terms = ppo_terms<T>(out.logits, out.value, in.action, in.old_log_prob, in.advantage, in.target,
                                         cfg, scale, grad_logits, grad_value);
  nn::Volume<T> d_features = policy.backward(*features, tape, grad_logits, grad_value, grad_policy, adapt);
  if (adapt) backbone.backward(in.color, btape, std::move(d_features), grad_backbone);
  return terms;
}

// First-order adaptive-moment optimizer over a flat parameter buffer.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t size, const PPOConfig& cfg)
      : m_(size, 0.0f), v_(size, 0.0f), lr_(cfg.learning_rate), b1_(cfg.adam_beta1), b2_(cfg.adam_beta2),
        eps_(cfg.adam_epsilon) {}

  void step(std::span<float> params, std::span<const float> grads);

  std::uint64_t steps() const { return t_; }
  std::span<const float> first_moment() const { return m_; }
  std::span<const float> second_moment() const { return v_; }
  void load(std::span<const float> m, std::span<const float> v, std::uint64_t t);

 private:
  std::vector<float> m_, v_;
  double lr_ = 3e-4, b1_ = 0.9, b2_ = 0.999, eps_ = 1e-8;
  std::uint64_t t_ = 0;
};

}  // namespace flatgrasp
