#pragma once

// Minimal convolution machinery for the backbone and the actor-critic.
// Everything is templated on the scalar so the same code runs in float for
// training and in double for finite-difference gradient checks.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "flatgrasp/error.hpp"
#include "flatgrasp/rng.hpp"

namespace flatgrasp::nn {

// Eigen peels vectorized reductions up to the next packet boundary, so the
// summation order depends on the buffer address. Every buffer Eigen maps is
// allocated at the maximum packet alignment to keep results independent of
// which thread or arena allocated it.
template <typename T>
using Buffer = std::vector<T, Eigen::aligned_allocator<T>>;

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

// Channel-major activation volume.
template <typename T>
struct Volume {
  int channels = 0;
  int height = 0;
  int width = 0;
  Buffer<T> data;

  Volume() = default;
  Volume(int c, int h, int w) : channels(c), height(h), width(w), data(static_cast<std::size_t>(c) * h * w, T(0)) {}

  std::size_t plane() const { return static_cast<std::size_t>(height) * width; }
  T& at(int c, int y, int x) { return data[c * plane() + static_cast<std::size_t>(y) * width + x]; }
  const T& at(int c, int y, int x) const { return data[c * plane() + static_cast<std::size_t>(y) * width + x]; }
};

struct ConvShape {
  int in_channels = 1;
  int out_channels = 1;
  int kernel = 3;
  int stride = 1;
  int dilation = 1;

  int padding() const { return dilation * (kernel / 2); }
  int out_size(int in) const { return (in + 2 * padding() - dilation * (kernel - 1) - 1) / stride + 1; }
  int fan_in() const { return in_channels * kernel * kernel; }
  std::size_t weight_count() const { return static_cast<std::size_t>(out_channels) * fan_in(); }
  std::size_t param_count() const { return weight_count() + static_cast<std::size_t>(out_channels); }
};

// A convolution's view into a flat parameter buffer: weights [out x fan_in]
// followed by biases [out].
struct ConvLayer {
  ConvShape shape;
  std::size_t offset = 0;
};

template <typename T>
void im2col(const Volume<T>& in, const ConvShape& s, int out_h, int out_w, Buffer<T>& col) {
  const int k = s.kernel, pad = s.padding();
  const std::size_t cols = static_cast<std::size_t>(out_h) * out_w;
  col.assign(static_cast<std::size_t>(s.fan_in()) * cols, T(0));
  for (int c = 0; c < in.channels; ++c)
    for (int ky = 0; ky < k; ++ky)
      for (int kx = 0; kx < k; ++kx) {
        T* dst = col.data() + (static_cast<std::size_t>(c) * k * k + ky * k + kx) * cols;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * s.stride - pad + ky * s.dilation;
          if (iy < 0 || iy >= in.height) continue;
          const T* src = &in.at(c, iy, 0);
          T* row = dst + static_cast<std::size_t>(oy) * out_w;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * s.stride - pad + kx * s.dilation;
            if (ix >= 0 && ix < in.width) row[ox] = src[ix];
          }
        }
      }
}

template <typename T>
void col2im(const Buffer<T>& col, const ConvShape& s, int out_h, int out_w, Volume<T>& grad_in) {
  const int k = s.kernel, pad = s.padding();
  const std::size_t cols = static_cast<std::size_t>(out_h) * out_w;
  for (int c = 0; c < grad_in.channels; ++c)
    for (int ky = 0; ky < k; ++ky)
      for (int kx = 0; kx < k; ++kx) {
        const T* src = col.data() + (static_cast<std::size_t>(c) * k * k + ky * k + kx) * cols;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * s.stride - pad + ky * s.dilation;
          if (iy < 0 || iy >= grad_in.height) continue;
          T* dst = &grad_in.at(c, iy, 0);
          const T* row = src + static_cast<std::size_t>(oy) * out_w;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * s.stride - pad + kx * s.dilation;
            if (ix >= 0 && ix < grad_in.width) dst[ix] += row[ox];
          }
        }
      }
}

// Saved state of one conv(+ReLU) application, needed by the backward pass.
template <typename T>
struct ConvTape {
  Buffer<T> col;
  Volume<T> output;  // post-activation
};

template <typename T>
Volume<T> conv_forward(const ConvLayer& layer, std::span<const T> params, const Volume<T>& in, bool relu,
                       ConvTape<T>* tape) {
  const ConvShape& s = layer.shape;
  if (in.channels != s.in_channels) throw InvalidArgument("conv input channel mismatch");
  const int oh = s.out_size(in.height), ow = s.out_size(in.width);
  const std::size_t cols = static_cast<std::size_t>(oh) * ow;
  Buffer<T> local_col;
  Buffer<T>& col = tape ? tape->col : local_col;
  Volume<T> out(s.out_channels, oh, ow);
  ConstMatrixMap<T> w(params.data() + layer.offset, s.out_channels, s.fan_in());
  const T* bias = params.data() + layer.offset + s.weight_count();
  MatrixMap<T> y(out.data.data(), s.out_channels, static_cast<Eigen::Index>(cols));
  if (s.kernel == 1 && s.stride == 1) {
    ConstMatrixMap<T> x(in.data.data(), s.in_channels, static_cast<Eigen::Index>(cols));
    y.noalias() = w * x;
  } else {
    im2col(in, s, oh, ow, col);
    ConstMatrixMap<T> x(col.data(), s.fan_in(), static_cast<Eigen::Index>(cols));
    y.noalias() = w * x;
  }
  for (int o = 0; o < s.out_channels; ++o) {
    auto row = y.row(o);
    row.array() += bias[o];
    if (relu) row = row.cwiseMax(T(0));
  }
  if (tape) tape->output = out;
  return out;
}

// Accumulates parameter gradients into `grads` (same layout as params) and
// returns the gradient w.r.t. the layer input. `grad_out` is consumed.
template <typename T>
Volume<T> conv_backward(const ConvLayer& layer, std::span<const T> params, const Volume<T>& in,
                        const ConvTape<T>& tape, bool relu, Volume<T> grad_out, std::span<T> grads,
                        bool need_input_grad) {
  const ConvShape& s = layer.shape;
  const int oh = grad_out.height, ow = grad_out.width;
  const auto cols = static_cast<Eigen::Index>(static_cast<std::size_t>(oh) * ow);
  if (relu) {
    for (std::size_t i = 0; i < grad_out.data.size(); ++i)
      if (!(tape.output.data[i] > T(0))) grad_out.data[i] = T(0);
  }
  MatrixMap<T> dy(grad_out.data.data(), s.out_channels, cols);
  MatrixMap<T> dw(grads.data() + layer.offset, s.out_channels, s.fan_in());
  T* db = grads.data() + layer.offset + s.weight_count();
  const bool pointwise = s.kernel == 1 && s.stride == 1;
  const T* xdata = pointwise ? in.data.data() : tape.col.data();
  ConstMatrixMap<T> x(xdata, s.fan_in(), cols);
  dw.noalias() += dy * x.transpose();
  for (int o = 0; o < s.out_channels; ++o) db[o] += dy.row(o).sum();

  Volume<T> grad_in(in.channels, in.height, in.width);
  if (!need_input_grad) return grad_in;
  ConstMatrixMap<T> w(params.data() + layer.offset, s.out_channels, s.fan_in());
  if (pointwise) {
    MatrixMap<T> dx(grad_in.data.data(), s.in_channels, cols);
    dx.noalias() = w.transpose() * dy;
  } else {
    Buffer<T> dcol(static_cast<std::size_t>(s.fan_in()) * static_cast<std::size_t>(cols));
    MatrixMap<T> dc(dcol.data(), s.fan_in(), cols);
    dc.noalias() = w.transpose() * dy;
    col2im(dcol, s, oh, ow, grad_in);
  }
  return grad_in;
}

// He-style uniform init, bound sqrt(6 / fan_in) times `gain`; biases zero.
template <typename T>
void init_conv(const ConvLayer& layer, std::span<T> params, Rng& rng, double gain = 1.0) {
  const double bound = gain * std::sqrt(6.0 / layer.shape.fan_in());
  T* w = params.data() + layer.offset;
  for (std::size_t i = 0; i < layer.shape.weight_count(); ++i) w[i] = static_cast<T>(rng.uniform(-bound, bound));
  std::fill_n(w + layer.shape.weight_count(), layer.shape.out_channels, T(0));
}

template <typename T>
bool all_finite(std::span<const T> v) {
  return std::all_of(v.begin(), v.end(), [](T x) { return std::isfinite(x); });
}

}  // namespace flatgrasp::nn
