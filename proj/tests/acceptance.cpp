// Acceptance harness: each headline property of the artifact is checked once
// and reported as a single [PASS]/[FAIL] line. The exit code is the number of
// failed checks, so `ctest` treats any regression as a failure while the log
// stays readable on its own.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rsrlab/cli.hpp"
#include "rsrlab/metrics.hpp"

using namespace rsrlab;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double secs(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

template <typename T>
void fill_uniform(Tensor<T>& t, Rng& rng, double lo, double hi) {
  for (int64_t i = 0; i < t.size(); ++i) t.data()[i] = static_cast<T>(rng.uniform(lo, hi));
}

double median3(double a, double b, double c) {
  double v[3] = {a, b, c};
  std::sort(v, v + 3);
  return v[1];
}

GeneratorConfig tiny_gcfg(int scale) {
  GeneratorConfig g;
  g.num_blocks = 1;
  g.base_channels = 8;
  g.growth_channels = 4;
  g.scale = scale;
  return g;
}

// procedural image: smooth sinusoidal field, soft disks, one stripe band --
// enough structure for super-resolution to have something to reconstruct
Image synth_field(int size, uint64_t seed) {
  Rng rng(seed);
  Image img(3, size, size);
  double base[3], fx[3], fy[3], ph[3], amp[3];
  for (int c = 0; c < 3; ++c) base[c] = rng.uniform(0.3, 0.7);
  for (int k = 0; k < 3; ++k) {
    fx[k] = rng.uniform(1.0, 4.0) / size;
    fy[k] = rng.uniform(1.0, 4.0) / size;
    ph[k] = rng.uniform(0.0, 6.28);
    amp[k] = rng.uniform(0.05, 0.15);
  }
  const double sf = rng.uniform(12.0, 24.0) / size;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      for (int c = 0; c < 3; ++c) {
        double v = base[c] + 0.05 * std::sin(6.28318 * sf * (x + 0.31 * y));
        for (int k = 0; k < 3; ++k)
          v += amp[k] * std::sin(6.28318 * (fx[k] * x + fy[k] * y) + ph[k] + c);
        img.at(c, y, x) = static_cast<float>(v);
      }
  const int nshapes = 4 + static_cast<int>(rng.below(3));
  for (int s = 0; s < nshapes; ++s) {
    const double cx = rng.uniform(0.1, 0.9) * size, cy = rng.uniform(0.1, 0.9) * size;
    const double r = rng.uniform(0.05, 0.2) * size, feather = rng.uniform(1.0, 3.0);
    double color[3];
    for (int c = 0; c < 3; ++c) color[c] = rng.uniform(0.1, 0.9);
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        const double d = std::sqrt((x - cx) * (x - cx) + (y - cy) * (y - cy));
        const double w = std::clamp((r - d) / feather, 0.0, 1.0) * 0.7;
        if (w > 0)
          for (int c = 0; c < 3; ++c)
            img.at(c, y, x) = static_cast<float>((1 - w) * img.at(c, y, x) + w * color[c]);
      }
  }
  for (int64_t i = 0; i < img.px.size(); ++i)
    img.px.data()[i] = std::clamp(img.px.data()[i], 0.f, 1.f);
  return img;
}

std::vector<PatchPair> synth_pairs(int images, int img_size, int patch, int stride, int scale,
                                   uint64_t seed) {
  std::vector<PatchPair> out;
  for (int i = 0; i < images; ++i) {
    const Image img = synth_field(img_size, derive_seed(seed, i));
    for (auto& p : crop_patches(img, patch, stride, 0)) out.push_back(make_pair(p, scale));
  }
  return out;
}

// ------------------------------------------------------------ 1: constraints

Outcome criterion_constraints() {
  ModelBundle bundle = init_models(tiny_gcfg(2), 101);
  Rng rng(0x51);
  const int kTrials = 1000;
  int inside = 0;
  double max_excess = -1.0, max_outside = 0.0;
  for (int trial = 0; trial < kTrials; ++trial) {
    const int h = 8 + static_cast<int>(rng.below(5));
    const int w = 8 + static_cast<int>(rng.below(5));
    Image lr(3, h, w), hr(3, 2 * h, 2 * w);
    fill_uniform(lr.px, rng, 0.0, 1.0);
    fill_uniform(hr.px, rng, 0.0, 1.0);

    AttackConfig cfg;
    cfg.epsilon = rng.uniform(0.0, 0.1);
    cfg.iters = static_cast<int>(rng.below(9));
    cfg.structure_scale = rng.uniform(1.0, 2.0);
    cfg.use_l1 = true;
    cfg.use_percep = trial % 4 == 0;
    cfg.seed = derive_seed(0x51, trial);

    const Image adv = pgd_attack(bundle, lr, hr, cfg);
    bool ok = true;
    for (int64_t i = 0; i < adv.px.size(); ++i) {
      const double v = adv.px.data()[i];
      const double excess = std::abs(v - static_cast<double>(lr.px.data()[i])) - cfg.epsilon;
      max_excess = std::max(max_excess, excess);
      max_outside = std::max({max_outside, -v, v - 1.0});
      if (excess > 1e-9 || v < 0.0 || v > 1.0) ok = false;
    }
    inside += ok;
  }
  return {inside == kTrials,
          fmt("%d/%d attacks inside the ball and [0,1]; max |adv-lr|-eps %.3g, max range "
              "overshoot %.3g",
              inside, kTrials, max_excess, max_outside)};
}

// -------------------------------------------------------------- 2: gradients

double central_diff(double* slot, double h, const std::function<double()>& eval) {
  const double saved = *slot;
  *slot = saved + h;
  const double up = eval();
  *slot = saved - h;
  const double dn = eval();
  *slot = saved;
  return (up - dn) / (2.0 * h);
}

double rel_err(double fd, double an) {
  return std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6});
}

struct ParamRef {
  Tensor<double>* w;
  Tensor<double>* dw;
};

template <typename Net>
std::vector<ParamRef> collect_params(Net& net) {
  std::vector<ParamRef> out;
  net.visit([&](const std::string&, Tensor<double>& w, Tensor<double>& dw) {
    out.push_back({&w, &dw});
  });
  return out;
}

template <typename T>
double dot(const Tensor<T>& a, const Tensor<T>& b) {
  double s = 0.0;
  for (int64_t i = 0; i < a.size(); ++i)
    s += static_cast<double>(a.data()[i]) * static_cast<double>(b.data()[i]);
  return s;
}

Outcome criterion_gradients() {
  Rng rng(0x52);
  double worst = 0.0;
  auto note = [&](double fd, double an) { worst = std::max(worst, rel_err(fd, an)); };

  {  // generator: random linear functional of the output
    Generator<double> G;
    G.init(tiny_gcfg(2), 201);
    Tensor<double> x({3, 8, 8}), r({3, 16, 16});
    fill_uniform(x, rng, 0.0, 1.0);
    fill_uniform(r, rng, -1.0, 1.0);
    Generator<double>::Ws ws;
    auto eval = [&]() { return dot(G.fwd(x, ws), r); };
    G.zero_grad();
    G.fwd(x, ws);
    Tensor<double> dx;
    G.bwd(ws, r, &dx, true);
    for (int k = 0; k < 5; ++k) {
      const int64_t i = static_cast<int64_t>(rng.below(static_cast<uint64_t>(x.size())));
      note(central_diff(&x.data()[i], 1e-6, eval), dx.data()[i]);
    }
    auto params = collect_params(G);
    for (int k = 0; k < 5; ++k) {
      ParamRef& p = params[rng.below(params.size())];
      const int64_t i = static_cast<int64_t>(rng.below(static_cast<uint64_t>(p.w->size())));
      note(central_diff(&p.w->data()[i], 1e-6, eval), p.dw->data()[i]);
    }
  }
  {  // discriminator: the logit itself
    Discriminator<double> D;
    D.init(8, 202);
    Tensor<double> x({3, 16, 16});
    fill_uniform(x, rng, 0.0, 1.0);
    Discriminator<double>::Ws ws;
    auto eval = [&]() { return D.fwd(x, ws); };
    D.zero_grad();
    D.fwd(x, ws);
    Tensor<double> dx;
    D.bwd(ws, 1.0, &dx, true);
    for (int k = 0; k < 5; ++k) {
      const int64_t i = static_cast<int64_t>(rng.below(static_cast<uint64_t>(x.size())));
      note(central_diff(&x.data()[i], 1e-6, eval), dx.data()[i]);
    }
    auto params = collect_params(D);
    for (int k = 0; k < 5; ++k) {
      ParamRef& p = params[rng.below(params.size())];
      const int64_t i = static_cast<int64_t>(rng.below(static_cast<uint64_t>(p.w->size())));
      note(central_diff(&p.w->data()[i], 1e-6, eval), p.dw->data()[i]);
    }
  }
  {  // feature net: random functionals of all stages, input gradient
    FeatureNet<double> F;
    F.init(203);
    Tensor<double> x({3, 16, 16});
    fill_uniform(x, rng, 0.0, 1.0);
    FeatureNet<double>::Ws ws;
    F.fwd(x, ws);
    Tensor<double> r[FeatureNet<double>::kStages];
    const Tensor<double>* dmaps[FeatureNet<double>::kStages];
    for (int s = 0; s < FeatureNet<double>::kStages; ++s) {
      r[s].reshape({ws.m[s].dim(0), ws.m[s].dim(1), ws.m[s].dim(2)});
      fill_uniform(r[s], rng, -1.0, 1.0);
      dmaps[s] = &r[s];
    }
    auto eval = [&]() {
      F.fwd(x, ws);
      double s = 0.0;
      for (int k = 0; k < FeatureNet<double>::kStages; ++k) s += dot(ws.m[k], r[k]);
      return s;
    };
    F.fwd(x, ws);
    Tensor<double> dx({3, 16, 16});
    dx.zero();
    F.bwd(ws, dmaps, dx.data());
    for (int k = 0; k < 5; ++k) {
      const int64_t i = static_cast<int64_t>(rng.below(static_cast<uint64_t>(x.size())));
      note(central_diff(&x.data()[i], 1e-6, eval), dx.data()[i]);
    }
  }
  {  // l1 loss
    Tensor<double> a({3, 6, 6}), b({3, 6, 6});
    fill_uniform(a, rng, 0.0, 1.0);
    fill_uniform(b, rng, 0.0, 1.0);
    Tensor<double> da({3, 6, 6});
    da.zero();
    l1_loss_grad(a, b, 1.0, da);
    auto eval = [&]() { return l1_loss(a, b); };
    for (int k = 0; k < 5; ++k) {
      const int64_t i = static_cast<int64_t>(rng.below(static_cast<uint64_t>(a.size())));
      note(central_diff(&a.data()[i], 1e-7, eval), da.data()[i]);
    }
  }
  {  // perceptual loss
    FeatureNet<double> F;
    F.init(204);
    Tensor<double> sr({3, 16, 16}), hr({3, 16, 16});
    fill_uniform(sr, rng, 0.0, 1.0);
    fill_uniform(hr, rng, 0.0, 1.0);
    FeatureNet<double>::Ws ws_sr, ws_hr;
    auto eval = [&]() { return perceptual_loss(F, sr, hr, ws_sr, ws_hr); };
    eval();
    Tensor<double> dsr({3, 16, 16});
    dsr.zero();
    perceptual_loss_grad(F, ws_sr, ws_hr, 1.0, dsr);
    for (int k = 0; k < 5; ++k) {
      const int64_t i = static_cast<int64_t>(rng.below(static_cast<uint64_t>(sr.size())));
      note(central_diff(&sr.data()[i], 1e-6, eval), dsr.data()[i]);
    }
  }
  {  // relativistic GAN terms over logits
    std::vector<double> real = {0.3, -1.1, 0.7}, fake = {-0.4, 0.9, 0.1, -0.2};
    std::vector<double> dgr, dgf, ddr, ddf;
    gan_loss_g_grad(real, fake, dgr, dgf);
    gan_loss_d_grad(real, fake, ddr, ddf);
    auto eval_g = [&]() { return gan_loss_g(real, fake); };
    auto eval_d = [&]() { return gan_loss_d(real, fake); };
    for (int k = 0; k < 5; ++k) {
      const bool on_real = rng.uniform() < 0.5;
      auto& vec = on_real ? real : fake;
      const size_t i = rng.below(vec.size());
      note(central_diff(&vec[i], 1e-6, eval_g), (on_real ? dgr : dgf)[i]);
      note(central_diff(&vec[i], 1e-6, eval_d), (on_real ? ddr : ddf)[i]);
    }
  }
  return {worst <= 1e-3, fmt("max relative error %.3g across G/D/F and all losses", worst)};
}

// ------------------------------------------------- 3: attack beats raw noise

Outcome criterion_attack_effectiveness() {
  auto train_pairs = synth_pairs(3, 64, 16, 16, 2, 301);
  auto held_out = synth_pairs(2, 64, 16, 16, 2, 302);  // 32 unseen patches

  TrainConfig tc;
  tc.seed = 303;
  tc.batch_size = 8;
  tc.total_iters = 150;
  tc.l1_warmup_iters = 150;
  tc.checkpoint_every = 1 << 30;
  TrainState st = make_train_state(tiny_gcfg(2), 303);
  pretrain_clean(st, train_pairs, tc);

  AttackConfig acfg;  // stock attack: eps 14/255, 2 iterations, structure 1.5
  int wins = 0;
  double worst_gap = 1e300;
  for (int trial = 0; trial < 20; ++trial) {
    double sum_pgd = 0.0, sum_rand = 0.0;
    for (size_t i = 0; i < held_out.size(); ++i) {
      acfg.seed = derive_seed(304, trial * 64 + static_cast<int64_t>(i));
      const Image adv = pgd_attack(st.bundle, held_out[i].lr, held_out[i].hr, acfg);
      sum_pgd += attack_loss(st.bundle, adv.px, held_out[i].hr.px, acfg);

      TensorF noisy = held_out[i].lr.px;
      Rng nr(derive_seed(305, trial * 64 + static_cast<int64_t>(i)));
      for (int64_t k = 0; k < noisy.size(); ++k)
        noisy.data()[k] += static_cast<float>(nr.uniform(-acfg.epsilon, acfg.epsilon));
      project(noisy, held_out[i].lr.px, acfg.epsilon);
      sum_rand += attack_loss(st.bundle, noisy, held_out[i].hr.px, acfg);
    }
    wins += sum_pgd > sum_rand;
    worst_gap = std::min(worst_gap, (sum_pgd - sum_rand) / static_cast<double>(held_out.size()));
  }
  return {wins >= 18,
          fmt("pgd mean loss beat random eps-noise in %d/20 trials (worst mean gap %.3g)", wins,
              worst_gap)};
}

// --------------------------------------- 4: robustness transfers (down-scaled)

struct SeedResult {
  double base_clean_psnr = 0.0;
  double rsr_corr_psnr = 0.0;  // mean over the three corruption families
  std::map<std::string, double> base_percep, rsr_percep;
};

Outcome criterion_central_claim() {
  // Fork right after L1 warmup; each arm then spends the same kExtra GAN
  // iterations, one on clean batches and one fully adversarial. A slightly
  // wider ball than the stock attack covers more of the sigma=0.04 gaussian
  // mass and transfers better to impulse noise.
  const int64_t kWarm = 300, kExtra = 150;

  GeneratorConfig gcfg;
  gcfg.num_blocks = 2;
  gcfg.base_channels = 16;
  gcfg.growth_channels = 8;
  gcfg.scale = 4;

  // ~200 patches of 32x32 LR (128x128 HR crops), plus held-out full images
  auto train_pairs = synth_pairs(12, 320, 128, 64, 4, 401);
  std::vector<PatchPair> eval_pairs;
  for (int i = 0; i < 12; ++i)
    eval_pairs.push_back(make_pair(synth_field(128, derive_seed(402, i)), 4));

  const std::vector<CorruptionSpec> corr = {CorruptionSpec::parse("gaussian:0.04", 411),
                                            CorruptionSpec::parse("salt_pepper:0.02", 412),
                                            CorruptionSpec::parse("quantize:16", 413)};

  std::vector<SeedResult> results;
  for (uint64_t seed = 0; seed < 3; ++seed) {
    gcfg.seed = seed;
    TrainConfig tc;
    tc.seed = seed;
    tc.batch_size = 4;
    tc.l1_warmup_iters = kWarm;
    tc.total_iters = kWarm;
    tc.adv_fraction = 1.0;
    tc.checkpoint_every = 1 << 30;
    tc.attack.seed = derive_seed(seed, 403);
    tc.attack.epsilon = 18.0 / 255;

    TrainState shared = make_train_state(gcfg, seed);
    pretrain_clean(shared, train_pairs, tc);

    TrainState base = shared;  // clean continuation for the same extra budget
    tc.total_iters = kWarm + kExtra;
    pretrain_clean(base, train_pairs, tc);

    TrainState rsr = shared;
    robust_train(rsr, train_pairs, tc);

    MetricReport rep_b = evaluate(base.bundle, eval_pairs, corr);
    MetricReport rep_r = evaluate(rsr.bundle, eval_pairs, corr);
    auto ab = rep_b.aggregates();
    auto ar = rep_r.aggregates();

    SeedResult res;
    res.base_clean_psnr = ab.at("clean").psnr_db;
    for (const auto& spec : corr) {
      res.base_percep[spec.label()] = ab.at(spec.label()).percep;
      res.rsr_percep[spec.label()] = ar.at(spec.label()).percep;
      res.rsr_corr_psnr += ar.at(spec.label()).psnr_db / static_cast<double>(corr.size());
    }
    results.push_back(res);
    std::printf("  seed %llu: base clean psnr %.3f, rsr corrupted psnr %.3f\n",
                static_cast<unsigned long long>(seed), res.base_clean_psnr, res.rsr_corr_psnr);
    std::fflush(stdout);
  }

  int wins = 0;
  std::string family_note;
  for (const auto& spec : corr) {
    const std::string label = spec.label();
    const double mb = median3(results[0].base_percep[label], results[1].base_percep[label],
                              results[2].base_percep[label]);
    const double mr = median3(results[0].rsr_percep[label], results[1].rsr_percep[label],
                              results[2].rsr_percep[label]);
    wins += mr < mb;
    family_note += fmt(" %s %.4f->%.4f", label.c_str(), mb, mr);
  }
  const double med_base_clean = median3(results[0].base_clean_psnr, results[1].base_clean_psnr,
                                        results[2].base_clean_psnr);
  const double med_rsr_corr = median3(results[0].rsr_corr_psnr, results[1].rsr_corr_psnr,
                                      results[2].rsr_corr_psnr);
  const bool psnr_ok = med_rsr_corr >= med_base_clean - 0.5;
  return {wins >= 2 && psnr_ok,
          fmt("median percep base->rsr:%s; rsr corrupted psnr %.3f vs base clean %.3f - 0.5",
              family_note.c_str(), med_rsr_corr, med_base_clean)};
}

// ---------------------------------------------------------- 5: metric oracles

double oracle_psnr(const Image& a, const Image& b) {
  double sum = 0.0, comp = 0.0;
  for (int64_t i = 0; i < a.px.size(); ++i) {
    const double d =
        static_cast<double>(a.px.data()[i]) - static_cast<double>(b.px.data()[i]);
    const double y = d * d - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double mse = sum / static_cast<double>(a.px.size());
  return 10.0 * std::log10(1.0 / mse);
}

double oracle_ssim(const Image& a, const Image& b) {
  double g[11];
  double norm = 0.0;
  for (int i = 0; i < 11; ++i) {
    const double d = i - 5.0;
    g[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    norm += g[i];
  }
  for (auto& v : g) v /= norm;
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const int c = a.channels(), h = a.height(), w = a.width();
  double total = 0.0;
  for (int ch = 0; ch < c; ++ch) {
    double acc = 0.0;
    int windows = 0;
    for (int y0 = 0; y0 + 11 <= h; ++y0)
      for (int x0 = 0; x0 + 11 <= w; ++x0) {
        double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
        for (int ky = 0; ky < 11; ++ky)
          for (int kx = 0; kx < 11; ++kx) {
            const double wgt = g[ky] * g[kx];
            const double va = a.at(ch, y0 + ky, x0 + kx);
            const double vb = b.at(ch, y0 + ky, x0 + kx);
            ma += wgt * va;
            mb += wgt * vb;
            saa += wgt * va * va;
            sbb += wgt * vb * vb;
            sab += wgt * va * vb;
          }
        acc += ((2 * ma * mb + c1) * (2 * (sab - ma * mb) + c2)) /
               ((ma * ma + mb * mb + c1) * (saa - ma * ma + sbb - mb * mb + c2));
        ++windows;
      }
    total += acc / windows;
  }
  return total / c;
}

Outcome criterion_metric_oracles() {
  Rng rng(0x55);
  double max_psnr_dev = 0.0, max_ssim_dev = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int h = 11 + static_cast<int>(rng.below(8));
    const int w = 11 + static_cast<int>(rng.below(8));
    Image a(3, h, w), b(3, h, w);
    fill_uniform(a.px, rng, 0.0, 1.0);
    fill_uniform(b.px, rng, 0.0, 1.0);
    max_psnr_dev = std::max(max_psnr_dev, std::abs(psnr(a, b) - oracle_psnr(a, b)));
    max_ssim_dev = std::max(max_ssim_dev, std::abs(ssim(a, b) - oracle_ssim(a, b)));
  }

  Image lo(2, 6, 6), hi(2, 6, 6);
  for (int64_t i = 0; i < lo.px.size(); ++i) lo.px.data()[i] = 0.2f;
  for (int64_t i = 0; i < hi.px.size(); ++i) hi.px.data()[i] = 0.7f;
  const double hand_dev = std::abs(psnr(lo, hi) - 6.0206);

  return {max_psnr_dev <= 1e-9 && max_ssim_dev <= 1e-6 && hand_dev <= 1e-4,
          fmt("psnr dev %.3g (tol 1e-9), ssim dev %.3g (tol 1e-6), hand value dev %.3g",
              max_psnr_dev, max_ssim_dev, hand_dev)};
}

// ------------------------------------------------------------ 6: determinism

Outcome criterion_determinism() {
  auto train_pairs = synth_pairs(2, 64, 16, 16, 2, 601);
  auto eval_pairs = synth_pairs(1, 48, 48, 48, 2, 602);
  const std::vector<CorruptionSpec> corr = {CorruptionSpec::parse("gaussian:0.05", 611),
                                            CorruptionSpec::parse("quantize:8", 612)};

  auto run_once = [&]() {
    TrainConfig tc;
    tc.seed = 603;
    tc.batch_size = 4;
    tc.l1_warmup_iters = 20;
    tc.total_iters = 20;
    tc.adv_fraction = 0.5;
    tc.checkpoint_every = 1 << 30;
    tc.attack.seed = 604;
    TrainState st = make_train_state(tiny_gcfg(2), 605);
    pretrain_clean(st, train_pairs, tc);
    tc.total_iters = 60;
    robust_train(st, train_pairs, tc);
    std::ostringstream csv;
    evaluate(st.bundle, eval_pairs, corr).write_csv(csv);
    return std::make_pair(bundle_checksum(st.bundle), csv.str());
  };

  const auto first = run_once();
  const auto second = run_once();
  const bool same_params = first.first == second.first;
  const bool same_csv = first.second == second.second;
  return {same_params && same_csv,
          fmt("parameter checksums %s (%016llx), metric CSVs %s",
              same_params ? "identical" : "DIFFER",
              static_cast<unsigned long long>(first.first),
              same_csv ? "identical" : "DIFFER")};
}

// ------------------------------------------------------- 7: ablation harness

Outcome criterion_ablation() {
  const fs::path base = fs::temp_directory_path() / "rsrlab-acceptance";
  fs::remove_all(base);
  fs::create_directories(base);

  auto run_cli = [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
    return code;
  };

  const std::string corpus_cfg = (base / "corpus.cfg").string();
  {
    std::ofstream os(corpus_cfg);
    os << "[run]\nseed = 7\nout_dir = " << (base / "data").string()
       << "\n[corpus]\ntrain_count = 2\neval_count = 2\nsize = 48\n";
  }
  if (run_cli({"gen-corpus", "--config", corpus_cfg}) != 0)
    return {false, "gen-corpus failed"};

  const std::string cfg = (base / "ablate.cfg").string();
  {
    std::ofstream os(cfg);
    os << "[run]\nseed = 7\nout_dir = " << (base / "out").string()
       << "\n[data]\ntrain_dir = " << (base / "data/train").string()
       << "\neval_dir = " << (base / "data/eval").string()
       << "\npatch_size = 8\npatch_stride = 12\ncorruptions = gaussian:0.04,quantize:16\n"
       << "[model]\nnum_blocks = 1\nbase_channels = 8\ngrowth_channels = 4\nscale = 2\n"
       << "[train]\nbatch_size = 2\ntotal_iters = 20\nl1_warmup_iters = 20\n"
       << "[ablate]\nrobust_iters = 50\n";
  }
  if (run_cli({"ablate", "--config", cfg}) != 0) return {false, "ablate failed"};

  std::ifstream is((base / "out/ablation.csv").string());
  if (!is) return {false, "ablation.csv missing"};
  std::string line;
  if (!std::getline(is, line) || line.rfind("epsilon,iters,structure,loss", 0) != 0)
    return {false, "ablation.csv header malformed"};
  int rows = 0, bad_values = 0;
  while (std::getline(is, line)) {
    ++rows;
    std::istringstream cells(line);
    std::string cell;
    int col = 0;
    while (std::getline(cells, cell, ',')) {
      if (col++ < 4) continue;  // epsilon/iters/structure/loss columns
      if (!std::isfinite(std::strtod(cell.c_str(), nullptr))) ++bad_values;
    }
  }
  // base row plus the default Table-1-style sweep: 5 + 4 + 2 + 2 cells
  const bool shape_ok = rows == 1 + 5 + 4 + 2 + 2;
  return {shape_ok && bad_values == 0,
          fmt("%d rows (want 14), %d non-finite metric cells", rows, bad_values)};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome (*run)();
  };
  const Entry entries[] = {
      {"pgd constraint fuzz", criterion_constraints},
      {"finite-difference gradients", criterion_gradients},
      {"attack beats random noise", criterion_attack_effectiveness},
      {"robust training generalizes to unseen corruptions", criterion_central_claim},
      {"metric oracles", criterion_metric_oracles},
      {"bitwise determinism", criterion_determinism},
      {"ablation sweep harness", criterion_ablation},
  };

  int failures = 0;
  for (size_t i = 0; i < std::size(entries); ++i) {
    const auto t0 = Clock::now();
    Outcome out;
    try {
      out = entries[i].run();
    } catch (const std::exception& e) {
      out = {false, fmt("exception: %s", e.what())};
    }
    failures += !out.pass;
    std::printf("[%s] criterion %zu: %s -- %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", i + 1,
                entries[i].name, out.detail.c_str(), secs(t0, Clock::now()));
    std::fflush(stdout);
  }
  std::printf("acceptance: %zu/%zu criteria passed\n", std::size(entries) - failures,
              std::size(entries));
  return failures;
}
