#pragma once

#include <cmath>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "rsrlab/errors.hpp"
#include "rsrlab/kernels.hpp"
#include "rsrlab/rng.hpp"
#include "rsrlab/tensor.hpp"

// Networks: an RRDB-style super-resolution generator, a strided-conv
// discriminator ending in a scalar logit, and a frozen random-weight feature
// extractor for the perceptual terms. All layers are templated on the scalar
// type: float runs through the dispatched SIMD kernels, double through the
// reference kernels for finite-difference checks.
//
// Backward passes are hand-written per layer. Gradient buffers accumulate
// across a batch; call zero_grad() before each batch. Activations live in
// per-net workspace structs so forward state survives until backward.

namespace rsrlab {

inline constexpr float kLreluSlope = 0.2f;
inline constexpr float kResidualScale = 0.2f;

struct GeneratorConfig {
  int num_blocks = 4;
  int base_channels = 32;
  int growth_channels = 16;
  int scale = 4;  // 2 or 4
  uint64_t seed = 0;

  void validate() const;
  int up_stages() const { return scale == 4 ? 2 : 1; }
};

// 3x3 conv, zero padding 1, optional leaky-relu fused behind it
template <typename T>
struct Conv3x3 {
  int cin = 0, cout = 0, stride = 1;
  T slope = T(0);  // 0 = linear
  Tensor<T> w, b, dw, db;

  void init(int cin_, int cout_, int stride_, T slope_, Rng& rng, double gain) {
    cin = cin_;
    cout = cout_;
    stride = stride_;
    slope = slope_;
    w.reshape({cout, cin, 3, 3});
    b.reshape({cout});
    dw.reshape({cout, cin, 3, 3});
    db.reshape({cout});
    const double std = gain * std::sqrt(2.0 / (9.0 * cin));
    for (int64_t i = 0; i < w.size(); ++i) w.data()[i] = static_cast<T>(rng.normal() * std);
    b.zero();
    zero_grad();
  }

  void fwd(const T* x, int h, int wid, Tensor<T>& y) const {
    const int ho = kernels::conv_out(h, stride), wo = kernels::conv_out(wid, stride);
    y.reshape({cout, ho, wo});
    kernels::conv3x3_fwd(x, cin, h, wid, w.data(), b.data(), cout, stride, y.data());
    if (slope > T(0)) kernels::lrelu_fwd(y.data(), y.data(), y.size(), slope);
  }

  // dy is overwritten in place (activation backward), then consumed.
  // dx_accum may be null when input gradients are not needed.
  void bwd(const T* x, int h, int wid, const Tensor<T>& y, Tensor<T>& dy, T* dx_accum,
           bool param_grads) {
    if (slope > T(0)) {
      for (int64_t i = 0; i < dy.size(); ++i)
        dy.data()[i] *= y.data()[i] > T(0) ? T(1) : slope;
    }
    if (param_grads)
      kernels::conv3x3_bwd_wts(x, cin, h, wid, dy.data(), cout, stride, dw.data(), db.data());
    if (dx_accum)
      kernels::conv3x3_bwd_data(dy.data(), cout, w.data(), cin, h, wid, stride, dx_accum);
  }

  void zero_grad() {
    dw.zero();
    db.zero();
  }
};

// visitor gets (name, param tensor, grad tensor) in a fixed order shared by
// the optimizer, checkpoints and checksums
template <typename T>
using ParamVisitor = std::function<void(const std::string&, Tensor<T>&, Tensor<T>&)>;

template <typename T>
void visit_conv(const std::string& name, Conv3x3<T>& c, const ParamVisitor<T>& fn) {
  fn(name + ".w", c.w, c.dw);
  fn(name + ".b", c.b, c.db);
}

// ---------------------------------------------------------------- generator

// x -> conv1..4 (lrelu, densely concatenated) -> conv5 -> x + 0.2 * conv5
template <typename T>
struct DenseBlock {
  Conv3x3<T> conv[5];
  int nf = 0, gc = 0;

  void init(int nf_, int gc_, Rng& rng) {
    nf = nf_;
    gc = gc_;
    for (int k = 0; k < 4; ++k)
      conv[k].init(nf + k * gc, gc, 1, static_cast<T>(kLreluSlope), rng, 0.1);
    conv[4].init(nf + 4 * gc, nf, 1, T(0), rng, 0.1);
  }

  struct Ws {
    Tensor<T> cat;   // (nf+4gc, h, w): input plus the four activated outputs
    Tensor<T> c5;    // conv5 output before the residual add
    Tensor<T> res;   // block output x + 0.2*c5
    Tensor<T> dcat;  // gradient staging for backward
    Tensor<T> dc5;
    Tensor<T> dz;    // activation-gradient scratch, (gc, h, w)
  };

  const Tensor<T>& fwd(const T* x, int h, int w, Ws& ws) const {
    ws.cat.reshape({nf + 4 * gc, h, w});
    const int64_t plane = static_cast<int64_t>(h) * w;
    std::memcpy(ws.cat.data(), x, sizeof(T) * nf * plane);
    for (int k = 0; k < 4; ++k) {
      // conv k reads the first nf+k*gc channels and appends its gc outputs
      T* dst = ws.cat.data() + (nf + k * gc) * plane;
      kernels::conv3x3_fwd(ws.cat.data(), nf + k * gc, h, w, conv[k].w.data(), conv[k].b.data(),
                           gc, 1, dst);
      kernels::lrelu_fwd(dst, dst, gc * plane, static_cast<T>(kLreluSlope));
    }
    conv[4].fwd(ws.cat.data(), h, w, ws.c5);
    ws.res.reshape({nf, h, w});
    std::memcpy(ws.res.data(), x, sizeof(T) * nf * plane);
    kernels::axpy(nf * plane, static_cast<T>(kResidualScale), ws.c5.data(), ws.res.data());
    return ws.res;
  }

  // d_res -> accumulate into dx (gradient w.r.t. the block input)
  void bwd(int h, int w, Ws& ws, const Tensor<T>& d_res, T* dx_accum, bool param_grads) {
    const int64_t plane = static_cast<int64_t>(h) * w;
    ws.dcat.reshape({nf + 4 * gc, h, w});
    ws.dcat.zero();
    kernels::axpy(nf * plane, T(1), d_res.data(), dx_accum);  // residual branch
    ws.dc5.reshape({nf, h, w});
    ws.dc5.zero();
    kernels::axpy(nf * plane, static_cast<T>(kResidualScale), d_res.data(), ws.dc5.data());
    conv[4].bwd(ws.cat.data(), h, w, ws.c5, ws.dc5, ws.dcat.data(), param_grads);
    ws.dz.reshape({gc, h, w});
    for (int k = 3; k >= 0; --k) {
      const T* yk = ws.cat.data() + (nf + k * gc) * plane;
      const T* dyk = ws.dcat.data() + (nf + k * gc) * plane;
      ws.dz.zero();
      kernels::lrelu_bwd(yk, dyk, ws.dz.data(), gc * plane, static_cast<T>(kLreluSlope));
      if (param_grads)
        kernels::conv3x3_bwd_wts(ws.cat.data(), nf + k * gc, h, w, ws.dz.data(), gc, 1,
                                 conv[k].dw.data(), conv[k].db.data());
      kernels::conv3x3_bwd_data(ws.dz.data(), gc, conv[k].w.data(), nf + k * gc, h, w, 1,
                                ws.dcat.data());
    }
    kernels::axpy(nf * plane, T(1), ws.dcat.data(), dx_accum);
  }

  void visit(const std::string& name, const ParamVisitor<T>& fn) {
    for (int k = 0; k < 5; ++k) visit_conv(name + ".c" + std::to_string(k + 1), conv[k], fn);
  }
  void zero_grad() {
    for (auto& c : conv) c.zero_grad();
  }
};

template <typename T>
struct RRDB {
  DenseBlock<T> db[3];

  void init(int nf, int gc, Rng& rng) {
    for (auto& d : db) d.init(nf, gc, rng);
  }

  struct Ws {
    typename DenseBlock<T>::Ws db[3];
    Tensor<T> out;  // in + 0.2 * db3(db2(db1(in)))
    Tensor<T> d3_grad, d2_grad, d1_grad;
  };

  const Tensor<T>& fwd(const T* x, int h, int w, Ws& ws) const {
    const auto& d1 = db[0].fwd(x, h, w, ws.db[0]);
    const auto& d2 = db[1].fwd(d1.data(), h, w, ws.db[1]);
    const auto& d3 = db[2].fwd(d2.data(), h, w, ws.db[2]);
    const int nf = db[0].nf;
    const int64_t plane = static_cast<int64_t>(h) * w;
    ws.out.reshape({nf, h, w});
    std::memcpy(ws.out.data(), x, sizeof(T) * nf * plane);
    kernels::axpy(nf * plane, static_cast<T>(kResidualScale), d3.data(), ws.out.data());
    return ws.out;
  }

  void bwd(int h, int w, Ws& ws, const Tensor<T>& d_out, T* dx_accum, bool param_grads) {
    const int nf = db[0].nf;
    const int64_t plane = static_cast<int64_t>(h) * w;
    kernels::axpy(nf * plane, T(1), d_out.data(), dx_accum);
    ws.d3_grad.reshape({nf, h, w});
    ws.d3_grad.zero();
    kernels::axpy(nf * plane, static_cast<T>(kResidualScale), d_out.data(), ws.d3_grad.data());
    ws.d2_grad.reshape({nf, h, w});
    ws.d2_grad.zero();
    db[2].bwd(h, w, ws.db[2], ws.d3_grad, ws.d2_grad.data(), param_grads);
    ws.d1_grad.reshape({nf, h, w});
    ws.d1_grad.zero();
    db[1].bwd(h, w, ws.db[1], ws.d2_grad, ws.d1_grad.data(), param_grads);
    db[0].bwd(h, w, ws.db[0], ws.d1_grad, dx_accum, param_grads);
  }

  void visit(const std::string& name, const ParamVisitor<T>& fn) {
    for (int k = 0; k < 3; ++k) db[k].visit(name + ".d" + std::to_string(k + 1), fn);
  }
  void zero_grad() {
    for (auto& d : db) d.zero_grad();
  }
};

template <typename T>
struct Generator {
  GeneratorConfig cfg;
  Conv3x3<T> conv_first;       // 3 -> nf
  std::vector<RRDB<T>> blocks;
  Conv3x3<T> trunk;            // nf -> nf
  std::vector<Conv3x3<T>> up;  // nf -> nf, lrelu, one per x2 stage
  Conv3x3<T> conv_last;        // nf -> 3, linear, no clamp

  void init(const GeneratorConfig& c, uint64_t seed) {
    c.validate();
    cfg = c;
    Rng rng(seed);
    const int nf = cfg.base_channels;
    conv_first.init(3, nf, 1, T(0), rng, 1.0);
    blocks.resize(cfg.num_blocks);
    for (auto& blk : blocks) blk.init(nf, cfg.growth_channels, rng);
    trunk.init(nf, nf, 1, T(0), rng, 1.0);
    up.resize(cfg.up_stages());
    for (auto& u : up) u.init(nf, nf, 1, static_cast<T>(kLreluSlope), rng, 1.0);
    conv_last.init(nf, 3, 1, T(0), rng, 1.0);
  }

  struct Ws {
    int h = -1, w = -1;
    Tensor<T> x;  // input copy, needed by conv_first backward
    Tensor<T> fea;
    std::vector<typename RRDB<T>::Ws> blocks;
    Tensor<T> trunk_out, fea2;
    std::vector<Tensor<T>> upin, upout;  // nn_up2 result / conv+lrelu result
    Tensor<T> out;
    Tensor<T> dout_scratch, dstage, dupin, dfea2, dblock, dblock_in;  // backward staging
  };

  // lr: (3, h, w) -> (3, s*h, s*w)
  const Tensor<T>& fwd(const Tensor<T>& lr, Ws& ws) const {
    if (lr.ndim() != 3 || lr.dim(0) != 3) throw DimensionError("generator expects (3,H,W) input");
    const int h = lr.dim(1), w = lr.dim(2);
    if (h < 8 || w < 8) throw DimensionError("generator input must be at least 8x8");
    ws.h = h;
    ws.w = w;
    ws.x = lr;
    conv_first.fwd(lr.data(), h, w, ws.fea);
    ws.blocks.resize(blocks.size());
    const T* cur = ws.fea.data();
    for (size_t i = 0; i < blocks.size(); ++i)
      cur = blocks[i].fwd(cur, h, w, ws.blocks[i]).data();
    trunk.fwd(cur, h, w, ws.trunk_out);
    ws.fea2 = ws.fea;
    kernels::axpy(ws.fea2.size(), T(1), ws.trunk_out.data(), ws.fea2.data());
    ws.upin.resize(up.size());
    ws.upout.resize(up.size());
    const Tensor<T>* level = &ws.fea2;
    int lh = h, lw = w;
    for (size_t k = 0; k < up.size(); ++k) {
      ws.upin[k].reshape({cfg.base_channels, lh * 2, lw * 2});
      kernels::nn_up2_fwd(level->data(), cfg.base_channels, lh, lw, ws.upin[k].data());
      lh *= 2;
      lw *= 2;
      up[k].fwd(ws.upin[k].data(), lh, lw, ws.upout[k]);
      level = &ws.upout[k];
    }
    conv_last.fwd(level->data(), lh, lw, ws.out);
    return ws.out;
  }

  // d_out: gradient w.r.t. fwd output. dx (same shape as input) is
  // overwritten; pass nullptr when only parameter gradients are wanted.
  // param_grads=false skips weight gradients (the attack path).
  void bwd(Ws& ws, const Tensor<T>& d_out, Tensor<T>* dx, bool param_grads) {
    const int h = ws.h, w = ws.w;
    const int nf = cfg.base_channels;
    int lh = h << static_cast<int>(up.size()), lw = w << static_cast<int>(up.size());

    ws.dstage.reshape({nf, lh, lw});
    ws.dstage.zero();
    ws.dout_scratch = d_out;
    conv_last.bwd(ws.upout.back().data(), lh, lw, ws.out, ws.dout_scratch, ws.dstage.data(),
                  param_grads);
    for (int k = static_cast<int>(up.size()) - 1; k >= 0; --k) {
      ws.dupin.reshape({nf, lh, lw});
      ws.dupin.zero();
      up[k].bwd(ws.upin[k].data(), lh, lw, ws.upout[k], ws.dstage, ws.dupin.data(), param_grads);
      lh /= 2;
      lw /= 2;
      ws.dstage.reshape({nf, lh, lw});
      ws.dstage.zero();
      kernels::nn_up2_bwd(ws.dupin.data(), nf, lh, lw, ws.dstage.data());
    }
    // dstage now holds d(fea2), which feeds both the trunk conv's output and,
    // via the global residual, conv_first's output
    ws.dfea2 = ws.dstage;
    ws.dblock.reshape({nf, h, w});
    ws.dblock.zero();
    trunk.bwd(ws.blocks.back().out.data(), h, w, ws.trunk_out, ws.dstage, ws.dblock.data(),
              param_grads);
    for (int i = static_cast<int>(blocks.size()) - 1; i >= 0; --i) {
      ws.dblock_in.reshape({nf, h, w});
      ws.dblock_in.zero();
      blocks[i].bwd(h, w, ws.blocks[i], ws.dblock, ws.dblock_in.data(), param_grads);
      std::swap(ws.dblock, ws.dblock_in);
    }
    kernels::axpy(ws.dblock.size(), T(1), ws.dfea2.data(), ws.dblock.data());
    if (dx) {
      dx->reshape({3, h, w});
      dx->zero();
    }
    conv_first.bwd(ws.x.data(), h, w, ws.fea, ws.dblock, dx ? dx->data() : nullptr, param_grads);
  }

  void visit(const ParamVisitor<T>& fn) {
    visit_conv<T>("g.first", conv_first, fn);
    for (size_t i = 0; i < blocks.size(); ++i) blocks[i].visit("g.b" + std::to_string(i + 1), fn);
    visit_conv<T>("g.trunk", trunk, fn);
    for (size_t i = 0; i < up.size(); ++i) visit_conv<T>("g.up" + std::to_string(i + 1), up[i], fn);
    visit_conv<T>("g.last", conv_last, fn);
  }
  void zero_grad() {
    conv_first.zero_grad();
    for (auto& b : blocks) b.zero_grad();
    trunk.zero_grad();
    for (auto& u : up) u.zero_grad();
    conv_last.zero_grad();
  }
};

// ------------------------------------------------------------ discriminator

// conv stack with three stride-2 stages, a final 1-channel conv, and
// logit = spatial mean of that map (size-agnostic scalar head)
template <typename T>
struct Discriminator {
  Conv3x3<T> c0, c1, c2, c3, c4;
  int nd = 8;

  void init(int base, uint64_t seed) {
    nd = base;
    Rng rng(seed);
    c0.init(3, nd, 1, static_cast<T>(kLreluSlope), rng, 1.0);
    c1.init(nd, 2 * nd, 2, static_cast<T>(kLreluSlope), rng, 1.0);
    c2.init(2 * nd, 4 * nd, 2, static_cast<T>(kLreluSlope), rng, 1.0);
    c3.init(4 * nd, 8 * nd, 2, static_cast<T>(kLreluSlope), rng, 1.0);
    c4.init(8 * nd, 1, 1, T(0), rng, 1.0);
  }

  struct Ws {
    int h = -1, w = -1;
    Tensor<T> x, a0, a1, a2, a3, a4;
    Tensor<T> d4, d3, d2, d1, d0;
  };

  T fwd(const Tensor<T>& img, Ws& ws) const {
    if (img.ndim() != 3 || img.dim(0) != 3)
      throw DimensionError("discriminator expects (3,H,W) input");
    const int h = img.dim(1), w = img.dim(2);
    if (h < 16 || w < 16) throw DimensionError("discriminator input must be at least 16x16");
    ws.h = h;
    ws.w = w;
    ws.x = img;
    c0.fwd(img.data(), h, w, ws.a0);
    c1.fwd(ws.a0.data(), h, w, ws.a1);
    int lh = kernels::conv_out(h, 2), lw = kernels::conv_out(w, 2);
    c2.fwd(ws.a1.data(), lh, lw, ws.a2);
    lh = kernels::conv_out(lh, 2);
    lw = kernels::conv_out(lw, 2);
    c3.fwd(ws.a2.data(), lh, lw, ws.a3);
    lh = kernels::conv_out(lh, 2);
    lw = kernels::conv_out(lw, 2);
    c4.fwd(ws.a3.data(), lh, lw, ws.a4);
    return static_cast<T>(kernels::vsum(ws.a4.data(), ws.a4.size()) / ws.a4.size());
  }

  void bwd(Ws& ws, T d_logit, Tensor<T>* dx, bool param_grads) {
    const int h = ws.h, w = ws.w;
    const int h1 = kernels::conv_out(h, 2), w1 = kernels::conv_out(w, 2);
    const int h2 = kernels::conv_out(h1, 2), w2 = kernels::conv_out(w1, 2);
    const int h3 = kernels::conv_out(h2, 2), w3 = kernels::conv_out(w2, 2);

    ws.d4.reshape({1, h3, w3});
    const T unit = d_logit / static_cast<T>(ws.d4.size());
    for (int64_t i = 0; i < ws.d4.size(); ++i) ws.d4.data()[i] = unit;
    ws.d3.reshape({8 * nd, h3, w3});
    ws.d3.zero();
    c4.bwd(ws.a3.data(), h3, w3, ws.a4, ws.d4, ws.d3.data(), param_grads);
    ws.d2.reshape({4 * nd, h2, w2});
    ws.d2.zero();
    c3.bwd(ws.a2.data(), h2, w2, ws.a3, ws.d3, ws.d2.data(), param_grads);
    ws.d1.reshape({2 * nd, h1, w1});
    ws.d1.zero();
    c2.bwd(ws.a1.data(), h1, w1, ws.a2, ws.d2, ws.d1.data(), param_grads);
    ws.d0.reshape({nd, h, w});
    ws.d0.zero();
    c1.bwd(ws.a0.data(), h, w, ws.a1, ws.d1, ws.d0.data(), param_grads);
    if (dx) {
      dx->reshape({3, h, w});
      dx->zero();
    }
    c0.bwd(ws.x.data(), h, w, ws.a0, ws.d0, dx ? dx->data() : nullptr, param_grads);
  }

  void visit(const ParamVisitor<T>& fn) {
    visit_conv<T>("d.c0", c0, fn);
    visit_conv<T>("d.c1", c1, fn);
    visit_conv<T>("d.c2", c2, fn);
    visit_conv<T>("d.c3", c3, fn);
    visit_conv<T>("d.c4", c4, fn);
  }
  void zero_grad() {
    c0.zero_grad();
    c1.zero_grad();
    c2.zero_grad();
    c3.zero_grad();
    c4.zero_grad();
  }
};

// --------------------------------------------------------- feature extractor

// four conv stages with average-pool halving between them; weights are drawn
// once from the seed and never trained
template <typename T>
struct FeatureNet {
  static constexpr int kStages = 4;
  Conv3x3<T> conv[kStages];
  int ch[kStages] = {8, 16, 32, 32};
  uint64_t seed = 0;

  void init(uint64_t seed_) {
    seed = seed_;
    Rng rng(seed_);
    int prev = 3;
    for (int s = 0; s < kStages; ++s) {
      conv[s].init(prev, ch[s], 1, static_cast<T>(kLreluSlope), rng, 1.0);
      prev = ch[s];
    }
  }

  struct Ws {
    int h = -1, w = -1;
    Tensor<T> x;
    Tensor<T> m[kStages];      // stage maps (post-activation, pre-pool)
    Tensor<T> p[kStages - 1];  // pooled maps
    Tensor<T> dm, dp;          // backward staging
  };

  // fills ws.m[0..3], each map spatially half the previous one
  void fwd(const Tensor<T>& img, Ws& ws) const {
    if (img.ndim() != 3 || img.dim(0) != 3)
      throw DimensionError("feature net expects (3,H,W) input");
    const int h = img.dim(1), w = img.dim(2);
    if (h < 16 || w < 16) throw DimensionError("feature net input must be at least 16x16");
    ws.h = h;
    ws.w = w;
    ws.x = img;
    int lh = h, lw = w;
    const T* cur = img.data();
    for (int s = 0; s < kStages; ++s) {
      conv[s].fwd(cur, lh, lw, ws.m[s]);
      if (s + 1 < kStages) {
        ws.p[s].reshape({ch[s], lh / 2, lw / 2});
        kernels::avgpool2_fwd(ws.m[s].data(), ch[s], lh, lw, ws.p[s].data());
        cur = ws.p[s].data();
        lh /= 2;
        lw /= 2;
      }
    }
  }

  // d_maps[s] may be null; dx is accumulated into (caller zeroes).
  // Parameters are frozen, so no weight gradients exist here.
  void bwd(Ws& ws, const Tensor<T>* const d_maps[kStages], T* dx_accum) {
    int hs[kStages], wss[kStages];
    {
      int lh = ws.h, lw = ws.w;
      for (int s = 0; s < kStages; ++s) {
        hs[s] = lh;
        wss[s] = lw;
        lh /= 2;
        lw /= 2;
      }
    }
    bool have_dp = false;
    for (int s = kStages - 1; s >= 0; --s) {
      ws.dm.reshape({ch[s], hs[s], wss[s]});
      ws.dm.zero();
      if (d_maps[s]) kernels::axpy(ws.dm.size(), T(1), d_maps[s]->data(), ws.dm.data());
      if (have_dp) kernels::avgpool2_bwd(ws.dp.data(), ch[s], hs[s], wss[s], ws.dm.data());
      if (s > 0) {
        ws.dp.reshape({ch[s - 1], hs[s], wss[s]});
        ws.dp.zero();
        conv[s].bwd(ws.p[s - 1].data(), hs[s], wss[s], ws.m[s], ws.dm, ws.dp.data(), false);
        have_dp = true;
      } else {
        conv[0].bwd(ws.x.data(), hs[0], wss[0], ws.m[0], ws.dm, dx_accum, false);
      }
    }
  }

  void visit(const ParamVisitor<T>& fn) {
    for (int s = 0; s < kStages; ++s) visit_conv<T>("f.c" + std::to_string(s), conv[s], fn);
  }
};

// -------------------------------------------------------------------- bundle

struct ModelBundle {
  GeneratorConfig gcfg;
  uint64_t seed = 0;
  Generator<float> G;
  Discriminator<float> D;
  FeatureNet<float> F;
};

// Deterministic initialization plus a one-batch liveness check that every
// trainable parameter receives a nonzero gradient (no dead subgraphs).
ModelBundle init_models(const GeneratorConfig& gcfg, uint64_t seed);

// FNV-1a over the raw parameter bytes in visit order
template <typename Net>
uint64_t param_checksum(Net& net) {
  uint64_t hash = 1469598103934665603ull;
  net.visit([&](const std::string&, auto& w, auto&) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(w.data());
    const size_t n = sizeof(w.data()[0]) * static_cast<size_t>(w.size());
    for (size_t i = 0; i < n; ++i) {
      hash ^= bytes[i];
      hash *= 1099511628211ull;
    }
  });
  return hash;
}

uint64_t bundle_checksum(ModelBundle& b);

}  // namespace rsrlab
