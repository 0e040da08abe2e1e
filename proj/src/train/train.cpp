#include <chrono>
#include <numeric>

#include "rsrlab/train.hpp"

namespace rsrlab {
namespace {

// stream tags so batch order, attack decisions, and attack noise come from
// independent derived streams; nothing here consumes the state rng, which
// makes every trajectory a pure function of (state, config)
constexpr uint64_t kEpochTag = 0x65706f63ull;   // batch permutations
constexpr uint64_t kAdvTag = 0x616476ull;       // per-item attack decisions
constexpr uint64_t kPgdTag = 0x706764ull;       // per-item attack noise

// maps a global sample position to a dataset index via per-epoch permutations
// derived from the config seed, so resuming at any iteration reproduces the
// exact batch order without sampler state in the checkpoint
class BatchSampler {
 public:
  BatchSampler(size_t n, uint64_t seed) : n_(n), seed_(seed) {}

  size_t index_at(int64_t pos) {
    const int64_t e = pos / static_cast<int64_t>(n_);
    if (e != epoch_) {
      perm_.resize(n_);
      std::iota(perm_.begin(), perm_.end(), size_t{0});
      Rng rng(derive_seed(seed_, kEpochTag, static_cast<uint64_t>(e)));
      rng.shuffle(perm_);
      epoch_ = e;
    }
    return perm_[static_cast<size_t>(pos % static_cast<int64_t>(n_))];
  }

 private:
  size_t n_;
  uint64_t seed_;
  int64_t epoch_ = -1;
  std::vector<size_t> perm_;
};

struct Scratch {
  explicit Scratch(int bs)
      : dws_r(bs), dws_f(bs), lr_in(bs), sr(bs), items(static_cast<size_t>(bs), nullptr) {}

  Generator<float>::Ws gws;
  std::vector<Discriminator<float>::Ws> dws_r, dws_f;
  FeatureNet<float>::Ws fws_sr, fws_hr;
  std::vector<TensorF> lr_in, sr;
  std::vector<const PatchPair*> items;
  TensorF d_sr, d_gan;
  std::vector<double> logit_r, logit_f, d_r, d_f;
};

struct Row {
  double l1 = 0, percep = 0, gan_g = 0, gan_d = 0, attack = 0;
};

void check_attack_output(const TensorF& adv, const TensorF& lr, double eps) {
  for (int64_t i = 0; i < adv.size(); ++i) {
    const float a = adv.data()[i], c = lr.data()[i];
    if (!(a >= 0.0f && a <= 1.0f) || std::abs(static_cast<double>(a) - c) > eps + 1e-6)
      throw NumericalError("adversarial example escaped the attack constraint set");
  }
}

void l1_step(TrainState& st, const std::vector<PatchPair>& data, const TrainConfig& cfg,
             BatchSampler& sampler, Scratch& sc, Row& row) {
  auto& B = st.bundle;
  const int bs = cfg.batch_size;
  double l1_sum = 0.0;
  B.G.zero_grad();
  for (int s = 0; s < bs; ++s) {
    const int64_t pos = st.iter * bs + s;
    const PatchPair& item = data[sampler.index_at(pos)];
    const TensorF& out = B.G.fwd(item.lr.px, sc.gws);
    sc.d_sr.reshape({out.dim(0), out.dim(1), out.dim(2)});
    sc.d_sr.zero();
    l1_sum += l1_loss(out, item.hr.px);
    l1_loss_grad(out, item.hr.px, static_cast<float>(cfg.weights.w_l1 / bs), sc.d_sr);
    B.G.bwd(sc.gws, sc.d_sr, nullptr, true);
  }
  st.g_opt.step(B.G, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_eps);
  row.l1 = l1_sum / bs;
}

void gan_step(TrainState& st, const std::vector<PatchPair>& data, const TrainConfig& cfg,
              bool adversarial, BatchSampler& sampler, Scratch& sc, Row& row) {
  auto& B = st.bundle;
  const int bs = cfg.batch_size;

  // assemble inputs; HR targets are never perturbed
  double atk_sum = 0.0;
  int atk_count = 0;
  for (int s = 0; s < bs; ++s) {
    const int64_t pos = st.iter * bs + s;
    const PatchPair& item = data[sampler.index_at(pos)];
    sc.items[s] = &item;
    bool attacked = false;
    if (adversarial) {
      Rng decide(derive_seed(cfg.attack.seed, kAdvTag, static_cast<uint64_t>(pos)));
      attacked = decide.uniform() < cfg.adv_fraction;
    }
    if (attacked) {
      AttackConfig acfg = cfg.attack;
      acfg.seed = derive_seed(cfg.attack.seed, kPgdTag, static_cast<uint64_t>(pos));
      Image adv = pgd_attack(B, item.lr, item.hr, acfg);
      check_attack_output(adv.px, item.lr.px, acfg.epsilon);
      atk_sum += attack_loss(B, adv.px, item.hr.px, acfg);
      ++atk_count;
      sc.lr_in[s] = std::move(adv.px);
    } else {
      sc.lr_in[s] = item.lr.px;
    }
  }
  row.attack = atk_count > 0 ? atk_sum / atk_count : 0.0;

  // discriminator step on (real HR, generated SR) logits
  for (int s = 0; s < bs; ++s) {
    B.G.fwd(sc.lr_in[s], sc.gws);
    sc.sr[s] = sc.gws.out;
  }
  sc.logit_r.resize(bs);
  sc.logit_f.resize(bs);
  for (int s = 0; s < bs; ++s) {
    sc.logit_r[s] = B.D.fwd(sc.items[s]->hr.px, sc.dws_r[s]);
    sc.logit_f[s] = B.D.fwd(sc.sr[s], sc.dws_f[s]);
  }
  row.gan_d = gan_loss_d(sc.logit_r, sc.logit_f);
  gan_loss_d_grad(sc.logit_r, sc.logit_f, sc.d_r, sc.d_f);
  B.D.zero_grad();
  for (int s = 0; s < bs; ++s) {
    B.D.bwd(sc.dws_r[s], static_cast<float>(sc.d_r[s]), nullptr, true);
    B.D.bwd(sc.dws_f[s], static_cast<float>(sc.d_f[s]), nullptr, true);
  }
  st.d_opt.step(B.D, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_eps);

  // generator step against the updated discriminator; generator weights have
  // not changed since the forward pass above, so sc.sr still equals G(lr_in)
  for (int s = 0; s < bs; ++s) {
    sc.logit_r[s] = B.D.fwd(sc.items[s]->hr.px, sc.dws_r[s]);
    sc.logit_f[s] = B.D.fwd(sc.sr[s], sc.dws_f[s]);
  }
  row.gan_g = gan_loss_g(sc.logit_r, sc.logit_f);
  gan_loss_g_grad(sc.logit_r, sc.logit_f, sc.d_r, sc.d_f);
  double l1_sum = 0.0, percep_sum = 0.0;
  B.G.zero_grad();
  for (int s = 0; s < bs; ++s) {
    const TensorF& hr = sc.items[s]->hr.px;
    B.G.fwd(sc.lr_in[s], sc.gws);  // rebuild activations for the backward pass
    sc.d_sr.reshape({sc.sr[s].dim(0), sc.sr[s].dim(1), sc.sr[s].dim(2)});
    sc.d_sr.zero();
    l1_sum += l1_loss(sc.sr[s], hr);
    l1_loss_grad(sc.sr[s], hr, static_cast<float>(cfg.weights.w_l1 / bs), sc.d_sr);
    percep_sum += perceptual_loss(B.F, sc.sr[s], hr, sc.fws_sr, sc.fws_hr);
    perceptual_loss_grad(B.F, sc.fws_sr, sc.fws_hr, static_cast<float>(cfg.weights.w_percep / bs),
                         sc.d_sr);
    B.D.bwd(sc.dws_f[s], static_cast<float>(cfg.weights.w_gan * sc.d_f[s]), &sc.d_gan, false);
    kernels::axpy(sc.d_sr.size(), 1.0f, sc.d_gan.data(), sc.d_sr.data());
    B.G.bwd(sc.gws, sc.d_sr, nullptr, true);
  }
  st.g_opt.step(B.G, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_eps);
  row.l1 = l1_sum / bs;
  row.percep = percep_sum / bs;
}

void run_loop(TrainState& st, const std::vector<PatchPair>& data, const TrainConfig& cfg,
              const TrainHooks& hooks, bool adversarial) {
  cfg.validate();
  if (st.iter >= cfg.total_iters) return;
  if (data.empty()) throw ArgumentError("training dataset is empty");
  for (const auto& p : data) p.check();

  BatchSampler sampler(data.size(), cfg.seed);
  Scratch sc(cfg.batch_size);
  while (st.iter < cfg.total_iters) {
    const auto t0 = std::chrono::steady_clock::now();
    Row row;
    if (st.iter < cfg.l1_warmup_iters)
      l1_step(st, data, cfg, sampler, sc, row);
    else
      gan_step(st, data, cfg, adversarial, sampler, sc, row);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double k = 0.01;  // informational moving averages
    st.avg.l1 += k * (row.l1 - st.avg.l1);
    st.avg.percep += k * (row.percep - st.avg.percep);
    st.avg.gan_g += k * (row.gan_g - st.avg.gan_g);
    st.avg.gan_d += k * (row.gan_d - st.avg.gan_d);
    st.avg.attack += k * (row.attack - st.avg.attack);

    st.iter += 1;
    if (hooks.log) hooks.log(st.iter, row.l1, row.percep, row.gan_g, row.gan_d, row.attack, wall);
    if (hooks.checkpoint && st.iter % cfg.checkpoint_every == 0) hooks.checkpoint(st);
  }
}

}  // namespace

void pretrain_clean(TrainState& st, const std::vector<PatchPair>& data, const TrainConfig& cfg,
                    const TrainHooks& hooks) {
  run_loop(st, data, cfg, hooks, false);
}

void robust_train(TrainState& st, const std::vector<PatchPair>& data, const TrainConfig& cfg,
                  const TrainHooks& hooks) {
  run_loop(st, data, cfg, hooks, true);
}

}  // namespace rsrlab
