#include "rsrlab/train.hpp"

namespace rsrlab {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("beta2 must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (total_iters < 0) throw ConfigError("total_iters must be non-negative");
  if (l1_warmup_iters < 0) throw ConfigError("l1_warmup_iters must be non-negative");
  if (l1_warmup_iters > total_iters)
    throw ConfigError("l1_warmup_iters cannot exceed total_iters");
  if (!(adv_fraction >= 0.0 && adv_fraction <= 1.0))
    throw ConfigError("adv_fraction must lie in [0, 1]");
  if (checkpoint_every < 1) throw ConfigError("checkpoint_every must be at least 1");
  weights.validate();
  attack.validate();
}

TrainState make_train_state(const GeneratorConfig& gcfg, uint64_t model_seed) {
  TrainState st;
  st.bundle = init_models(gcfg, model_seed);
  st.g_opt.attach(st.bundle.G);
  st.d_opt.attach(st.bundle.D);
  st.iter = 0;
  st.rng = Rng(derive_seed(model_seed, 0x7261696eULL, 0));  // "rain" tag for the training stream
  return st;
}

}  // namespace rsrlab
