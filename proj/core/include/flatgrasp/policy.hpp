#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "flatgrasp/nn.hpp"
#include "flatgrasp/world.hpp"

namespace flatgrasp {

enum class AcMode { kShared, kIndependent };
std::string_view ac_mode_name(AcMode m);
AcMode parse_ac_mode(std::string_view name);

struct PolicyConfig {
  AcMode ac_mode = AcMode::kShared;
  int feature_channels = 8;
  int hidden_channels = 16;
  // Trunk is two 3x3 stride-1 convolutions; dilation widens their reach so an
  // action cell sees the whole object (see README, "Architecture").
  std::array<int, 2> trunk_dilation{4, 8};
  int map_size = kFeatureSize;
  std::uint64_t seed = 2;
  double actor_head_gain = 0.01;

  int action_count() const { return map_size * map_size; }
};

template <typename T>
struct PolicyOutput {
  nn::Buffer<T> logits;  // map_size^2, row-major
  T value = T(0);
};

// CNN actor-critic over the backbone feature volume. Parameter layout, in
// declaration order: actor trunk (2 convs), [critic trunk (2 convs) when
// independent], actor 1x1 head, critic affine head.
template <typename T>
class PolicyNetwork {
 public:
  struct TrunkTape {
    std::array<nn::ConvTape<T>, 2> layers;
  };
  struct Tape {
    TrunkTape actor;
    TrunkTape critic;  // only used in independent mode
    nn::ConvTape<T> head;
    std::vector<T> pooled;
  };

  explicit PolicyNetwork(const PolicyConfig& config) : config_(config) {
    if (config.feature_channels < 1 || config.hidden_channels < 1 || config.map_size < 1)
      throw InvalidArgument("policy channel counts and map size must be positive");
    std::size_t offset = 0;
    auto add = [&](nn::ConvShape s) {
      nn::ConvLayer l{s, offset};
      offset += s.param_count();
      return l;
    };
    const int c = config.feature_channels, h = config.hidden_channels;
    actor_trunk_[0] = add({c, h, 3, 1, config.trunk_dilation[0]});
    actor_trunk_[1] = add({h, h, 3, 1, config.trunk_dilation[1]});
    if (independent()) {
      critic_trunk_[0] = add({c, h, 3, 1, config.trunk_dilation[0]});
      critic_trunk_[1] = add({h, h, 3, 1, config.trunk_dilation[1]});
    }
    actor_head_ = add({h, 1, 1, 1, 1});
    critic_offset_ = offset;
    offset += static_cast<std::size_t>(h) + 1;
    params_.assign(offset, T(0));

    Rng rng(hash_seed(config.seed, {0xac7ULL}));
    for (const auto& l : actor_trunk_) nn::init_conv<T>(l, params_, rng);
    if (independent())
      for (const auto& l : critic_trunk_) nn::init_conv<T>(l, params_, rng);
    nn::init_conv<T>(actor_head_, params_, rng, config.actor_head_gain);
    const double bound = std::sqrt(6.0 / h);
    for (int i = 0; i < h; ++i) params_[critic_offset_ + i] = static_cast<T>(rng.uniform(-bound, bound));
  }

  const PolicyConfig& config() const { return config_; }
  bool independent() const { return config_.ac_mode == AcMode::kIndependent; }
  std::span<const T> params() const { return params_; }
  std::span<T> mutable_params() { return params_; }
  std::size_t param_count() const { return params_.size(); }
  void load_params(std::span<const T> values) {
    if (values.size() != params_.size()) throw FormatError("policy parameter count mismatch");
    std::copy(values.begin(), values.end(), params_.begin());
  }

  PolicyOutput<T> forward(const nn::Volume<T>& features, Tape* tape = nullptr) const {
    check_features(features);
    PolicyOutput<T> out;
    TrunkTape* at = tape ? &tape->actor : nullptr;
    nn::Volume<T> actor = trunk(actor_trunk_, features, at);
    nn::Volume<T> logits = nn::conv_forward<T>(actor_head_, params_, actor, false, tape ? &tape->head : nullptr);
    out.logits = std::move(logits.data);

    const nn::Volume<T>* critic_in = &actor;
    nn::Volume<T> critic;
    if (independent()) {
      critic = trunk(critic_trunk_, features, tape ? &tape->critic : nullptr);
      critic_in = &critic;
    }
    const int h = config_.hidden_channels;
    std::vector<T> pooled(static_cast<std::size_t>(h));
    const std::size_t plane = critic_in->plane();
    for (int c = 0; c < h; ++c) {
      T acc = T(0);
      const T* p = critic_in->data.data() + c * plane;
      for (std::size_t i = 0; i < plane; ++i) acc += p[i];
      pooled[c] = acc / static_cast<T>(plane);
    }
    T v = params_[critic_offset_ + h];
    for (int c = 0; c < h; ++c) v += params_[critic_offset_ + c] * pooled[c];
    out.value = v;
    if (tape) tape->pooled = std::move(pooled);
    return out;
  }

  // Accumulates parameter gradients; returns d(loss)/d(features) when asked.
  nn::Volume<T> backward(const nn::Volume<T>& features, const Tape& tape, std::span<const T> grad_logits,
                         T grad_value, std::span<T> grads, bool need_feature_grad) const {
    const int h = config_.hidden_channels, m = config_.map_size;
    const std::size_t plane = static_cast<std::size_t>(m) * m;
    // critic head
    for (int c = 0; c < h; ++c) grads[critic_offset_ + c] += grad_value * tape.pooled[c];
    grads[critic_offset_ + h] += grad_value;
    nn::Volume<T> d_critic_trunk(h, m, m);
    for (int c = 0; c < h; ++c) {
      const T g = grad_value * params_[critic_offset_ + c] / static_cast<T>(plane);
      std::fill_n(d_critic_trunk.data.begin() + c * plane, plane, g);
    }
    // actor head
    nn::Volume<T> d_logits(1, m, m);
    std::copy(grad_logits.begin(), grad_logits.end(), d_logits.data.begin());
    const nn::Volume<T>& actor_out = tape.actor.layers[1].output;
    nn::Volume<T> d_actor = nn::conv_backward<T>(actor_head_, params_, actor_out, tape.head, false,
                                                 std::move(d_logits), grads, true);
    nn::Volume<T> d_features;
    if (independent()) {
      d_features = trunk_backward(actor_trunk_, features, tape.actor, std::move(d_actor), grads, need_feature_grad);
      nn::Volume<T> d2 =
          trunk_backward(critic_trunk_, features, tape.critic, std::move(d_critic_trunk), grads, need_feature_grad);
      if (need_feature_grad)
        for (std::size_t i = 0; i < d_features.data.size(); ++i) d_features.data[i] += d2.data[i];
    } else {
      for (std::size_t i = 0; i < d_actor.data.size(); ++i) d_actor.data[i] += d_critic_trunk.data[i];
      d_features = trunk_backward(actor_trunk_, features, tape.actor, std::move(d_actor), grads, need_feature_grad);
    }
    return d_features;
  }

 private:
  void check_features(const nn::Volume<T>& f) const {
    if (f.channels != config_.feature_channels || f.height != config_.map_size || f.width != config_.map_size)
      throw InvalidArgument("feature volume shape does not match the policy");
  }

  nn::Volume<T> trunk(const std::array<nn::ConvLayer, 2>& layers, const nn::Volume<T>& x, TrunkTape* tape) const {
    nn::Volume<T> y = nn::conv_forward<T>(layers[0], params_, x, true, tape ? &tape->layers[0] : nullptr);
    return nn::conv_forward<T>(layers[1], params_, y, true, tape ? &tape->layers[1] : nullptr);
  }

  nn::Volume<T> trunk_backward(const std::array<nn::ConvLayer, 2>& layers, const nn::Volume<T>& x,
                               const TrunkTape& tape, nn::Volume<T> grad, std::span<T> grads,
                               bool need_input_grad) const {
    grad = nn::conv_backward<T>(layers[1], params_, tape.layers[0].output, tape.layers[1], true, std::move(grad),
                                grads, true);
    return nn::conv_backward<T>(layers[0], params_, x, tape.layers[0], true, std::move(grad), grads,
                                need_input_grad);
  }

  PolicyConfig config_;
  std::array<nn::ConvLayer, 2> actor_trunk_{};
  std::array<nn::ConvLayer, 2> critic_trunk_{};
  nn::ConvLayer actor_head_{};
  std::size_t critic_offset_ = 0;
  nn::Buffer<T> params_;
};

}  // namespace flatgrasp
