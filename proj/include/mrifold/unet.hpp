#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrifold/conv.hpp"
#include "mrifold/random.hpp"
#include "mrifold/tensor.hpp"

namespace mrifold {

/// Architecture parameters. depth counts pooling levels; base_channels is
/// the feature count after the first conv block, doubling per level.
struct UNetConfig {
  int input_size = 64;
  int depth = 3;
  int base_channels = 16;

  void validate() const {
    if (depth < 1) throw std::invalid_argument("UNetConfig: depth must be >= 1");
    if (base_channels < 1) throw std::invalid_argument("UNetConfig: base_channels must be >= 1");
    if (input_size < 1) throw std::invalid_argument("UNetConfig: input_size must be >= 1");
    int n = input_size;
    for (int d = 0; d < depth; ++d) {
      if (n % 2 != 0)
        throw std::invalid_argument("UNetConfig: input_size must be divisible by 2^depth");
      n /= 2;
    }
  }
};

/// One conv layer's bookkeeping: its name, kernel geometry, and where its
/// weights live in the flat layer list.
struct LayerSpec {
  std::string name;
  int out_ch = 0;
  int in_ch = 0;
  int ksize = 3;

  std::size_t weight_count() const {
    return static_cast<std::size_t>(out_ch) * in_ch * ksize * ksize;
  }
};

/// Conv layers in execution order: contracting blocks, bottom block,
/// expansive blocks (deepest first), terminal 1x1.
inline std::vector<LayerSpec> layer_specs(const UNetConfig& cfg) {
  cfg.validate();
  std::vector<LayerSpec> specs;
  const int c0 = cfg.base_channels;
  auto ch = [&](int level) { return c0 << level; };

  for (int l = 0; l < cfg.depth; ++l) {
    const int in = l == 0 ? 1 : ch(l - 1);
    specs.push_back({"enc" + std::to_string(l) + "_conv0", ch(l), in, 3});
    specs.push_back({"enc" + std::to_string(l) + "_conv1", ch(l), ch(l), 3});
  }
  specs.push_back({"bottom_conv0", ch(cfg.depth), ch(cfg.depth - 1), 3});
  specs.push_back({"bottom_conv1", ch(cfg.depth), ch(cfg.depth), 3});
  for (int l = cfg.depth - 1; l >= 0; --l) {
    specs.push_back({"dec" + std::to_string(l) + "_conv0", ch(l), ch(l) + ch(l + 1), 3});
    specs.push_back({"dec" + std::to_string(l) + "_conv1", ch(l), ch(l), 3});
  }
  specs.push_back({"final_conv", 1, c0, 1});
  return specs;
}

/// All kernels, no biases anywhere. layers[i] is (out, in, k, k) row-major
/// for layer_specs(config)[i].
template <class T>
struct UNetWeights {
  UNetConfig config;
  std::vector<std::vector<T>> layers;

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.size();
    return n;
  }
};

/// Every kernel entry i.i.d. Normal(0, 0.01^2) from the seed.
template <class T = float>
UNetWeights<T> init_weights(const UNetConfig& cfg, std::uint64_t seed) {
  UNetWeights<T> w;
  w.config = cfg;
  Rng rng(seed);
  for (const auto& spec : layer_specs(cfg)) {
    std::vector<T> k(spec.weight_count());
    for (auto& v : k) v = static_cast<T>(rng.normal(0.0, 0.01));
    w.layers.push_back(std::move(k));
  }
  return w;
}

template <class T>
void require_weight_shapes(const UNetWeights<T>& w) {
  const auto specs = layer_specs(w.config);
  if (w.layers.size() != specs.size())
    throw std::invalid_argument("UNetWeights: wrong number of layers");
  for (std::size_t i = 0; i < specs.size(); ++i)
    if (w.layers[i].size() != specs[i].weight_count())
      throw std::invalid_argument("UNetWeights: layer " + specs[i].name + " has wrong size");
}

/// Everything the backward pass replays: per-conv inputs and post-activation
/// outputs (final conv: raw output), plus pooling winners per level.
template <class T>
struct UNetTrace {
  std::vector<Tensor3<T>> conv_in;
  std::vector<Tensor3<T>> conv_out;
  std::vector<std::vector<int>> pool_argmax;
};

/// Full forward pass. `trace` may be null for inference.
template <class T>
Tensor3<T> unet_forward(const UNetWeights<T>& w, const Tensor3<T>& input, UNetTrace<T>* trace,
                        ConvScratch<T>& scratch) {
  require_weight_shapes(w);
  const UNetConfig& cfg = w.config;
  require_shape(input, 1, cfg.input_size, cfg.input_size, "unet_forward");
  const auto specs = layer_specs(cfg);

  if (trace) {
    trace->conv_in.clear();
    trace->conv_out.clear();
    trace->pool_argmax.assign(cfg.depth, {});
  }
  std::size_t li = 0;  // next conv layer index
  auto conv_relu = [&](const Tensor3<T>& x, bool act) {
    const LayerSpec& spec = specs[li];
    Tensor3<T> out(spec.out_ch, x.h, x.w);
    conv_forward(x, w.layers[li], spec.out_ch, spec.ksize, out, scratch);
    if (act)
      for (auto& v : out.v) v = std::max(v, T{});
    if (trace) {
      trace->conv_in.push_back(x);
      trace->conv_out.push_back(out);
    }
    ++li;
    return out;
  };

  std::vector<Tensor3<T>> skips;
  Tensor3<T> x = input;
  for (int l = 0; l < cfg.depth; ++l) {
    x = conv_relu(x, true);
    x = conv_relu(x, true);
    skips.push_back(x);
    std::vector<int> argmax;
    x = maxpool2x2(x, argmax);
    if (trace) trace->pool_argmax[l] = std::move(argmax);
  }
  x = conv_relu(x, true);
  x = conv_relu(x, true);
  for (int l = cfg.depth - 1; l >= 0; --l) {
    x = concat_channels(skips[l], avg_unpool2x2(x));
    x = conv_relu(x, true);
    x = conv_relu(x, true);
  }
  return conv_relu(x, false);  // terminal 1x1, no activation
}

/// Inference-only forward (no trace).
template <class T>
Tensor3<T> unet_forward(const UNetWeights<T>& w, const Tensor3<T>& input,
                        ConvScratch<T>& scratch) {
  return unet_forward(w, input, static_cast<UNetTrace<T>*>(nullptr), scratch);
}

/// Convenience single-image inference.
template <class T>
Image unet_apply(const UNetWeights<T>& w, const Image& input) {
  ConvScratch<T> scratch;
  return to_image(unet_forward<T>(w, to_tensor<T>(input), scratch));
}

/// Exact backpropagation through the traced forward pass. Adds each layer's
/// kernel gradient into `grads` (shapes must match the weights; batch
/// accumulation is the caller adding across samples).
template <class T>
void unet_backward(const UNetWeights<T>& w, const UNetTrace<T>& trace, const Tensor3<T>& dout,
                   std::vector<std::vector<T>>& grads, ConvScratch<T>& scratch) {
  require_weight_shapes(w);
  const UNetConfig& cfg = w.config;
  const auto specs = layer_specs(cfg);
  if (trace.conv_in.size() != specs.size())
    throw std::invalid_argument("unet_backward: trace does not cover every layer");
  if (grads.size() != specs.size())
    throw std::invalid_argument("unet_backward: gradient buffers missing");

  std::size_t li = specs.size();  // walk layers in reverse
  Tensor3<T> g = dout;
  auto conv_back = [&](bool act) {
    --li;
    const LayerSpec& spec = specs[li];
    if (act) relu_backward(trace.conv_out[li], g);
    Tensor3<T> dx(spec.in_ch, g.h, g.w);
    conv_backward(trace.conv_in[li], w.layers[li], spec.out_ch, spec.ksize, g, grads[li], dx,
                  scratch);
    g = std::move(dx);
  };

  conv_back(false);  // final 1x1
  std::vector<Tensor3<T>> skip_grads(cfg.depth);
  for (int l = 0; l < cfg.depth; ++l) {
    conv_back(true);
    conv_back(true);
    // Split the concat gradient: skip channels first, upsampled second.
    const int skip_ch = cfg.base_channels << l;
    Tensor3<T> gs(skip_ch, g.h, g.w);
    Tensor3<T> gu(g.ch - skip_ch, g.h, g.w);
    std::copy(g.v.begin(), g.v.begin() + gs.v.size(), gs.v.begin());
    std::copy(g.v.begin() + gs.v.size(), g.v.end(), gu.v.begin());
    skip_grads[l] = std::move(gs);
    g = avg_unpool2x2_backward(gu);
  }
  conv_back(true);
  conv_back(true);
  for (int l = cfg.depth - 1; l >= 0; --l) {
    Tensor3<T> up = maxpool2x2_backward(g, trace.pool_argmax[l], g.h * 2, g.w * 2);
    for (std::size_t i = 0; i < up.v.size(); ++i) up.v[i] += skip_grads[l].v[i];
    g = std::move(up);
    conv_back(true);
    conv_back(true);
  }
}

}  // namespace mrifold
