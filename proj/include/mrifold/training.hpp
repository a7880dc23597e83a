#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrifold/kspace.hpp"
#include "mrifold/random.hpp"
#include "mrifold/unet.hpp"

namespace mrifold {

/// The optimization recipe: RMSProp with moving-average decay, epsilon
/// inside the square root.
struct TrainConfig {
  double learning_rate = 0.001;
  double rms_decay = 0.9;
  int batch_size = 32;
  int epochs = 150;
  std::uint64_t seed = 0;
  double epsilon = 1e-8;

  void validate() const {
    if (learning_rate <= 0.0) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (rms_decay <= 0.0 || rms_decay >= 1.0)
      throw std::invalid_argument("TrainConfig: rms_decay must be in (0,1)");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (epochs < 0) throw std::invalid_argument("TrainConfig: epochs must be >= 0");
    if (epsilon <= 0.0) throw std::invalid_argument("TrainConfig: epsilon must be > 0");
  }
};

/// Aliased input paired with its ground truth.
struct TrainingPair {
  Image input;
  Image target;
};

/// What a run carries forward: weights, per-weight squared-gradient
/// accumulators, and the per-epoch mean loss history.
template <class T>
struct TrainState {
  UNetWeights<T> weights;
  std::vector<std::vector<T>> rms_acc;
  int epoch = 0;
  std::vector<double> loss_history;
};

/// Squared l2 difference averaged over pixels.
inline double l2_loss(const Image& prediction, const Image& target) {
  require_same_size(prediction.size(), target.size(), "l2_loss");
  double s = 0.0;
  for (std::size_t i = 0; i < prediction.numel(); ++i) {
    const double d = prediction.raw()[i] - target.raw()[i];
    s += d * d;
  }
  return s / static_cast<double>(prediction.numel());
}

/// acc <- decay*acc + (1-decay)*g^2 ; w <- w - lr*g/(sqrt(acc)+eps).
///
/// The epsilon sits outside the square root.  With it inside, the denominator
/// bottoms out at sqrt(eps)=1e-4, so parameters whose squared-gradient average
/// stays below eps (every layer of a freshly initialised net here) would move
/// at ~1e4*lr*g per step and the optimiser never leaves the flat region.
/// Outside, the update approaches lr*sign(g) as soon as acc is warmed up,
/// which is the behaviour the default schedule was tuned for.
template <class T>
void rmsprop_step(TrainState<T>& state, const std::vector<std::vector<T>>& grads,
                  const TrainConfig& cfg) {
  if (grads.size() != state.weights.layers.size())
    throw std::invalid_argument("rmsprop_step: gradient layer count mismatch");
  const T lr = static_cast<T>(cfg.learning_rate);
  const T decay = static_cast<T>(cfg.rms_decay);
  const T eps = static_cast<T>(cfg.epsilon);
  for (std::size_t l = 0; l < grads.size(); ++l) {
    auto& w = state.weights.layers[l];
    auto& acc = state.rms_acc[l];
    const auto& g = grads[l];
    if (g.size() != w.size()) throw std::invalid_argument("rmsprop_step: gradient shape mismatch");
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!std::isfinite(static_cast<double>(g[i])))
        throw NumericError("rmsprop_step: non-finite gradient in layer " + std::to_string(l));
      acc[i] = decay * acc[i] + (T{1} - decay) * g[i] * g[i];
      w[i] -= lr * g[i] / (std::sqrt(acc[i]) + eps);
    }
  }
}

/// For each image y: input = |F^-1(P(S(F(y))))|, target = y.
inline std::vector<TrainingPair> make_training_pairs(const std::vector<Image>& images,
                                                     const SamplingMask& mask) {
  std::vector<TrainingPair> pairs;
  pairs.reserve(images.size());
  for (const auto& y : images) {
    require_same_size(y.size(), mask.n, "make_training_pairs");
    UndersampledKSpace x = subsample(forward_dft(y), mask);
    pairs.push_back({zero_fill_recon(x), y});
  }
  return pairs;
}

/// Called after each epoch with (epoch index, mean loss over the epoch).
using EpochCallback = std::function<void(int, double)>;

/// Mini-batch RMSProp training of the U-net on (aliased, truth) pairs.
/// Deterministic: one RNG seeded from cfg.seed drives every shuffle, and all
/// reductions run in a fixed order. The last short batch is kept.
///
/// on_state, when set, fires after every epoch with the full mutable-free view
/// of the optimizer state; callers use it for periodic checkpoints without
/// splitting the run (which would restart the shuffle stream).
template <class T>
TrainState<T> train(const std::vector<TrainingPair>& pairs, const TrainConfig& cfg,
                    const UNetConfig& net_cfg, const EpochCallback& on_epoch = {},
                    const std::function<void(const TrainState<T>&)>& on_state = {}) {
  cfg.validate();
  net_cfg.validate();
  if (pairs.empty()) throw std::invalid_argument("train: need at least one training pair");
  for (const auto& p : pairs) {
    require_same_size(p.input.size(), net_cfg.input_size, "train: input");
    require_same_size(p.target.size(), net_cfg.input_size, "train: target");
  }

  TrainState<T> state;
  state.weights = init_weights<T>(net_cfg, cfg.seed);
  for (const auto& l : state.weights.layers) state.rms_acc.emplace_back(l.size(), T{});

  const int m = static_cast<int>(pairs.size());
  const std::size_t npix = static_cast<std::size_t>(net_cfg.input_size) * net_cfg.input_size;
  std::vector<Tensor3<T>> inputs, targets;
  inputs.reserve(m);
  targets.reserve(m);
  for (const auto& p : pairs) {
    inputs.push_back(to_tensor<T>(p.input));
    targets.push_back(to_tensor<T>(p.target));
  }

  Rng rng(split_seed(cfg.seed, 0x7261696e));  // shuffle stream
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);

  ConvScratch<T> scratch;
  UNetTrace<T> trace;
  std::vector<std::vector<T>> grads;
  for (const auto& l : state.weights.layers) grads.emplace_back(l.size(), T{});

  for (int ep = 0; ep < cfg.epochs; ++ep) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (int start = 0; start < m; start += cfg.batch_size) {
      const int bsz = std::min(cfg.batch_size, m - start);
      for (auto& g : grads) std::fill(g.begin(), g.end(), T{});
      double batch_loss = 0.0;
      for (int bi = 0; bi < bsz; ++bi) {
        const int idx = order[start + bi];
        Tensor3<T> pred = unet_forward(state.weights, inputs[idx], &trace, scratch);
        Tensor3<T> dout(1, pred.h, pred.w);
        double sample_loss = 0.0;
        const T scale = static_cast<T>(2.0 / (static_cast<double>(npix) * bsz));
        for (std::size_t i = 0; i < pred.numel(); ++i) {
          const double d = static_cast<double>(pred.v[i]) - static_cast<double>(targets[idx].v[i]);
          sample_loss += d * d;
          dout.v[i] = scale * static_cast<T>(d);
        }
        sample_loss /= static_cast<double>(npix);
        if (!std::isfinite(sample_loss))
          throw NumericError("train: non-finite loss at epoch " + std::to_string(ep) + ", batch " +
                             std::to_string(start / cfg.batch_size));
        batch_loss += sample_loss;
        unet_backward(state.weights, trace, dout, grads, scratch);
      }
      epoch_loss += batch_loss;  // sum of per-sample losses
      rmsprop_step(state, grads, cfg);
    }
    state.epoch = ep + 1;
    state.loss_history.push_back(epoch_loss / m);
    if (on_epoch) on_epoch(ep, state.loss_history.back());
    if (on_state) on_state(state);
  }
  return state;
}

}  // namespace mrifold
