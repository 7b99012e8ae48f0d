#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "flatgrasp/nn.hpp"
#include "flatgrasp/world.hpp"

namespace flatgrasp {

enum class BackboneMode { kFixed, kAdaptive };
std::string_view backbone_mode_name(BackboneMode m);
BackboneMode parse_backbone_mode(std::string_view name);

struct BackboneConfig {
  BackboneMode mode = BackboneMode::kFixed;
  int channels = 8;
  std::uint64_t seed = 1;
  // Three 3x3 stages; the default takes 224 -> 112 -> 56 -> 56.
  std::array<int, 3> strides{2, 2, 1};
  int input_size = kGridSize;

  int output_size() const;
};

// Seeded convolutional feature extractor over the colour heightmap.
template <typename T>
class Backbone {
 public:
  struct Tape {
    std::array<nn::ConvTape<T>, 3> stages;
  };

  explicit Backbone(const BackboneConfig& config) : config_(config) {
    if (config.channels < 1) throw InvalidArgument("backbone channels must be >= 1");
    int in_c = 3;
    std::size_t offset = 0;
    for (int i = 0; i < 3; ++i) {
      layers_[i].shape = {in_c, config.channels, 3, config.strides[i], 1};
      layers_[i].offset = offset;
      offset += layers_[i].shape.param_count();
      in_c = config.channels;
    }
    params_.assign(offset, T(0));
    Rng rng(hash_seed(config.seed, {0xbacbULL}));
    for (const auto& l : layers_) nn::init_conv<T>(l, params_, rng);
  }

  const BackboneConfig& config() const { return config_; }
  bool trainable() const { return config_.mode == BackboneMode::kAdaptive; }
  std::span<const T> params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }
  const std::array<nn::ConvLayer, 3>& layers() const { return layers_; }

  // Only the optimizer (adaptive mode) and snapshot restore write weights.
  std::span<T> mutable_params() {
    if (!trainable()) throw InvalidArgument("fixed backbone weights are immutable");
    return params_;
  }
  void load_params(std::span<const T> values) {
    if (values.size() != params_.size()) throw FormatError("backbone parameter count mismatch");
    std::copy(values.begin(), values.end(), params_.begin());
  }

  // `color` is 3 x S x S channel-major, values in [0, 1].
  nn::Volume<T> extract(std::span<const T> color, Tape* tape = nullptr) const {
    const int s = config_.input_size;
    if (color.size() != static_cast<std::size_t>(3) * s * s)
      throw InvalidArgument("backbone input must be 3 x " + std::to_string(s) + " x " + std::to_string(s));
    nn::Volume<T> x(3, s, s);
    std::copy(color.begin(), color.end(), x.data.begin());
    return run(std::move(x), tape);
  }

  // Accumulates into grads (backbone layout). Input gradient is not needed.
  void backward(std::span<const T> color, const Tape& tape, nn::Volume<T> grad_features, std::span<T> grads) const {
    const int s = config_.input_size;
    nn::Volume<T> input(3, s, s);
    std::copy(color.begin(), color.end(), input.data.begin());
    for (int i = 2; i >= 0; --i) {
      const nn::Volume<T>& in = i == 0 ? input : tape.stages[i - 1].output;
      grad_features = nn::conv_backward<T>(layers_[i], params_, in, tape.stages[i], true, std::move(grad_features),
                                           grads, i > 0);
    }
  }

 private:
  nn::Volume<T> run(nn::Volume<T> x, Tape* tape) const {
    for (int i = 0; i < 3; ++i)
      x = nn::conv_forward<T>(layers_[i], params_, x, true, tape ? &tape->stages[i] : nullptr);
    return x;
  }

  BackboneConfig config_;
  std::array<nn::ConvLayer, 3> layers_;
  nn::Buffer<T> params_;
};

}  // namespace flatgrasp
