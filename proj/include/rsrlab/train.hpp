#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rsrlab/attack.hpp"
#include "rsrlab/losses.hpp"

namespace rsrlab {

struct TrainConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double adam_eps = 1e-8;
  int batch_size = 8;
  int64_t total_iters = 2000;      // absolute target iteration count
  int64_t l1_warmup_iters = 0;     // absolute: iterations below this use L1 only
  double adv_fraction = 1.0;
  LossWeights weights;
  AttackConfig attack;
  uint64_t seed = 0;
  int64_t checkpoint_every = 500;

  void validate() const;
};

// bias-corrected Adam over a network's visit order
struct AdamState {
  std::vector<TensorF> m, v;
  int64_t t = 0;

  template <typename Net>
  void attach(Net& net) {
    m.clear();
    v.clear();
    t = 0;
    net.visit([&](const std::string&, TensorF& w, TensorF&) {
      TensorF zm, zv;
      zm.reshape({static_cast<int>(w.size())});
      zv.reshape({static_cast<int>(w.size())});
      zm.zero();
      zv.zero();
      m.push_back(std::move(zm));
      v.push_back(std::move(zv));
    });
  }

  template <typename Net>
  void step(Net& net, double lr, double b1, double b2, double eps) {
    t += 1;
    const float bc1 = static_cast<float>(1.0 / (1.0 - std::pow(b1, static_cast<double>(t))));
    const float bc2 = static_cast<float>(1.0 / (1.0 - std::pow(b2, static_cast<double>(t))));
    size_t k = 0;
    net.visit([&](const std::string& name, TensorF& w, TensorF& g) {
      for (int64_t i = 0; i < g.size(); ++i)
        if (!std::isfinite(g.data()[i]))
          throw NumericalError("non-finite gradient in " + name);
      kernels::adam_step(w.size(), w.data(), m[k].data(), v[k].data(), g.data(),
                         static_cast<float>(lr), static_cast<float>(b1), static_cast<float>(b2),
                         static_cast<float>(eps), bc1, bc2);
      ++k;
    });
    if (k != m.size()) throw DimensionError("optimizer/network parameter count mismatch");
  }
};

struct RunningLoss {
  double l1 = 0.0, percep = 0.0, gan_g = 0.0, gan_d = 0.0, attack = 0.0;
};

struct TrainState {
  ModelBundle bundle;
  AdamState g_opt, d_opt;
  int64_t iter = 0;
  Rng rng;
  RunningLoss avg;  // exponential moving averages of the logged losses
};

TrainState make_train_state(const GeneratorConfig& gcfg, uint64_t model_seed);

struct TrainHooks {
  // one row per iteration: iter, l1, percep, gan_g, gan_d, attack_loss_mean, wall_time
  std::function<void(int64_t, double, double, double, double, double, double)> log;
  // called every cfg.checkpoint_every iterations
  std::function<void(TrainState&)> checkpoint;
};

// Stage 1: L1 warmup then GAN training on clean pairs, D-then-G per batch.
// Runs until state.iter == cfg.total_iters.
void pretrain_clean(TrainState& state, const std::vector<PatchPair>& dataset,
                    const TrainConfig& cfg, const TrainHooks& hooks = {});

// Stage 2: per batch, LR inputs are replaced by fresh PGD examples with
// probability adv_fraction (HR targets stay clean), then the usual D/G steps.
void robust_train(TrainState& state, const std::vector<PatchPair>& dataset, const TrainConfig& cfg,
                  const TrainHooks& hooks = {});

// versioned single-file checkpoint: parameters, optimizer moments, iteration
// counter and rng state round-trip losslessly
void save_checkpoint(TrainState& state, const std::string& path);
TrainState load_checkpoint(const std::string& path);

}  // namespace rsrlab
