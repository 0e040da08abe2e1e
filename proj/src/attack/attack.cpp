#include <cmath>

#include "rsrlab/attack.hpp"
#include "rsrlab/losses.hpp"

namespace rsrlab {

void AttackConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("attack epsilon must be in [0,1]");
  if (iters < 0) throw ConfigError("attack iters must be >= 0");
  const double a = step();
  if (!(a >= 0.0) || a > epsilon + 1e-12)
    throw ConfigError("attack alpha must satisfy 0 <= alpha <= epsilon");
  if (structure_scale < 1.0) throw ConfigError("attack structure_scale must be >= 1");
  if (iters > 0 && !use_l1 && !use_percep)
    throw ConfigError("attack needs at least one of use_l1/use_percep");
}

TensorF init_structured_noise(int h, int w, int c, const AttackConfig& cfg) {
  if (h < 1 || w < 1 || c < 1) throw ArgumentError("init_structured_noise: bad dims");
  if (cfg.structure_scale < 1.0) throw ConfigError("structure_scale must be >= 1");
  const double ss = cfg.structure_scale;
  const int gh = static_cast<int>(std::ceil(h / ss));
  const int gw = static_cast<int>(std::ceil(w / ss));
  Rng rng(cfg.seed);
  TensorF grid({c, gh, gw});
  for (int64_t i = 0; i < grid.size(); ++i)
    grid.data()[i] = static_cast<float>(rng.uniform(-cfg.epsilon, cfg.epsilon));

  TensorF noise({c, h, w});
  for (int ch = 0; ch < c; ++ch)
    for (int y = 0; y < h; ++y) {
      const int gy = std::min(static_cast<int>(y / ss), gh - 1);
      for (int x = 0; x < w; ++x) {
        const int gx = std::min(static_cast<int>(x / ss), gw - 1);
        noise.at(ch, y, x) = grid.at(ch, gy, gx);
      }
    }
  return noise;
}

void project(TensorF& x, const TensorF& x0, double eps) {
  if (!x.same_shape(x0)) throw DimensionError("project shape mismatch");
  kernels::project_box(x.size(), x.data(), x0.data(), eps);
}

double attack_loss(ModelBundle& bundle, const TensorF& x, const TensorF& hr,
                   const AttackConfig& cfg) {
  if (!cfg.use_l1 && !cfg.use_percep) throw ConfigError("attack_loss: both terms disabled");
  Generator<float>::Ws gws;
  const TensorF& sr = bundle.G.fwd(x, gws);
  if (!sr.same_shape(hr)) throw DimensionError("attack_loss: hr dims do not match G output");
  double loss = 0.0;
  if (cfg.use_l1) loss += l1_loss(sr, hr);
  if (cfg.use_percep) {
    FeatureNet<float>::Ws fa, fb;
    loss += perceptual_loss(bundle.F, sr, hr, fa, fb);
  }
  return loss;
}

TensorF pgd_core(const TensorF& lr, const AttackConfig& cfg, const AttackLossFn& fn) {
  cfg.validate();
  const int c = lr.dim(0), h = lr.dim(1), w = lr.dim(2);
  TensorF x = lr;
  {
    const TensorF noise = init_structured_noise(h, w, c, cfg);
    kernels::axpy(x.size(), 1.f, noise.data(), x.data());
  }
  project(x, lr, cfg.epsilon);

  const float alpha = static_cast<float>(cfg.step());
  TensorF grad, center;
  for (int t = 0; t < cfg.iters; ++t) {
    fn(x, &grad);
    for (int64_t i = 0; i < grad.size(); ++i)
      if (!std::isfinite(grad.data()[i]))
        throw NumericalError("pgd_attack: non-finite gradient at iteration " + std::to_string(t));
    if (cfg.recenter) center = x;
    kernels::sign_ascent(x.size(), x.data(), grad.data(), alpha);
    if (cfg.recenter) project(x, center, cfg.epsilon);
    project(x, lr, cfg.epsilon);
  }
  return x;
}

Image pgd_attack(ModelBundle& bundle, const Image& lr, const Image& hr, const AttackConfig& cfg) {
  if (hr.height() != bundle.gcfg.scale * lr.height() ||
      hr.width() != bundle.gcfg.scale * lr.width() || hr.channels() != lr.channels())
    throw DimensionError("pgd_attack: (lr, hr) is not a pair at the generator scale");

  Generator<float>::Ws gws;
  FeatureNet<float>::Ws fws_sr, fws_hr;
  TensorF d_sr;
  const auto fn = [&](const TensorF& x, TensorF* grad) -> double {
    const TensorF& sr = bundle.G.fwd(x, gws);
    double loss = 0.0;
    if (cfg.use_l1) loss += l1_loss(sr, hr.px);
    if (cfg.use_percep) loss += perceptual_loss(bundle.F, sr, hr.px, fws_sr, fws_hr);
    if (grad) {
      d_sr.reshape({sr.dim(0), sr.dim(1), sr.dim(2)});
      d_sr.zero();
      if (cfg.use_l1) l1_loss_grad(sr, hr.px, 1.f, d_sr);
      if (cfg.use_percep) perceptual_loss_grad(bundle.F, fws_sr, fws_hr, 1.f, d_sr);
      bundle.G.bwd(gws, d_sr, grad, false);
    }
    return loss;
  };
  return Image(pgd_core(lr.px, cfg, fn));
}

}  // namespace rsrlab
