// AVX-512F variants of the 3x3 convolution kernels (16-lane fp32). Same
// padded-scratch scheme as the AVX2 file; elementwise ops stay on AVX2 since
// they are memory-bound anyway.

#include <immintrin.h>

#include <cstring>
#include <vector>

#include "rsrlab/kernels.hpp"
#include "kernels_generic.hpp"

namespace rsrlab::kernels::avx512 {

bool supported() { return __builtin_cpu_supports("avx512f"); }

namespace {

thread_local std::vector<float> tl_pad;
thread_local std::vector<float> tl_wflip;

const float* pad3(const float* x, int c, int h, int w) {
  const int hp = h + 2, wp = w + 2;
  tl_pad.resize(static_cast<size_t>(c) * hp * wp);
  float* p = tl_pad.data();
  for (int ci = 0; ci < c; ++ci) {
    float* dst = p + static_cast<size_t>(ci) * hp * wp;
    std::memset(dst, 0, sizeof(float) * wp);
    for (int y = 0; y < h; ++y) {
      float* row = dst + static_cast<size_t>(y + 1) * wp;
      row[0] = 0.f;
      std::memcpy(row + 1, x + (static_cast<size_t>(ci) * h + y) * w, sizeof(float) * w);
      row[w + 1] = 0.f;
    }
    std::memset(dst + static_cast<size_t>(h + 1) * wp, 0, sizeof(float) * wp);
  }
  return p;
}

template <bool Acc>
void conv_core(const float* xpad, int cin, int h, int w, const float* wts, const float* bias,
               int cout, float* y) {
  const int wp = w + 2, hp = h + 2;
  const auto xrow = [&](int ci, int yy) {
    return xpad + (static_cast<size_t>(ci) * hp + yy) * wp;
  };

  int co = 0;
  for (; co + 2 <= cout; co += 2) {
    const float* w0 = wts + static_cast<size_t>(co) * cin * 9;
    const float* w1 = w0 + static_cast<size_t>(cin) * 9;
    const float b0s = bias ? bias[co] : 0.f;
    const float b1s = bias ? bias[co + 1] : 0.f;
    for (int oy = 0; oy < h; ++oy) {
      float* y0 = y + (static_cast<size_t>(co) * h + oy) * w;
      float* y1 = y0 + static_cast<size_t>(h) * w;
      int ox = 0;
      for (; ox + 16 <= w; ox += 16) {
        __m512 a0, c0;
        if constexpr (Acc) {
          a0 = _mm512_loadu_ps(y0 + ox);
          c0 = _mm512_loadu_ps(y1 + ox);
        } else {
          a0 = _mm512_set1_ps(b0s);
          c0 = _mm512_set1_ps(b1s);
        }
        for (int ci = 0; ci < cin; ++ci) {
          const float* base = xrow(ci, oy) + ox;
          const float* wc0 = w0 + ci * 9;
          const float* wc1 = w1 + ci * 9;
#pragma GCC unroll 9
          for (int k = 0; k < 9; ++k) {
            const __m512 x0 = _mm512_loadu_ps(base + (k / 3) * wp + (k % 3));
            a0 = _mm512_fmadd_ps(x0, _mm512_set1_ps(wc0[k]), a0);
            c0 = _mm512_fmadd_ps(x0, _mm512_set1_ps(wc1[k]), c0);
          }
        }
        _mm512_storeu_ps(y0 + ox, a0);
        _mm512_storeu_ps(y1 + ox, c0);
      }
      if (ox < w) {
        const __mmask16 tm = static_cast<__mmask16>((1u << (w - ox)) - 1u);
        __m512 a0, c0;
        if constexpr (Acc) {
          a0 = _mm512_maskz_loadu_ps(tm, y0 + ox);
          c0 = _mm512_maskz_loadu_ps(tm, y1 + ox);
        } else {
          a0 = _mm512_set1_ps(b0s);
          c0 = _mm512_set1_ps(b1s);
        }
        for (int ci = 0; ci < cin; ++ci) {
          const float* base = xrow(ci, oy) + ox;
          const float* wc0 = w0 + ci * 9;
          const float* wc1 = w1 + ci * 9;
#pragma GCC unroll 9
          for (int k = 0; k < 9; ++k) {
            const __m512 x0 = _mm512_maskz_loadu_ps(tm, base + (k / 3) * wp + (k % 3));
            a0 = _mm512_fmadd_ps(x0, _mm512_set1_ps(wc0[k]), a0);
            c0 = _mm512_fmadd_ps(x0, _mm512_set1_ps(wc1[k]), c0);
          }
        }
        _mm512_mask_storeu_ps(y0 + ox, tm, a0);
        _mm512_mask_storeu_ps(y1 + ox, tm, c0);
      }
    }
  }
  if (co < cout) {
    const float* w0 = wts + static_cast<size_t>(co) * cin * 9;
    const float b0s = bias ? bias[co] : 0.f;
    for (int oy = 0; oy < h; ++oy) {
      float* y0 = y + (static_cast<size_t>(co) * h + oy) * w;
      for (int ox = 0; ox < w; ox += 16) {
        const int rem = w - ox;
        const __mmask16 tm =
            rem >= 16 ? static_cast<__mmask16>(0xffff) : static_cast<__mmask16>((1u << rem) - 1u);
        __m512 a0 = Acc ? _mm512_maskz_loadu_ps(tm, y0 + ox) : _mm512_set1_ps(b0s);
        for (int ci = 0; ci < cin; ++ci) {
          const float* base = xrow(ci, oy) + ox;
          const float* wc0 = w0 + ci * 9;
#pragma GCC unroll 9
          for (int k = 0; k < 9; ++k) {
            const __m512 x0 = _mm512_maskz_loadu_ps(tm, base + (k / 3) * wp + (k % 3));
            a0 = _mm512_fmadd_ps(x0, _mm512_set1_ps(wc0[k]), a0);
          }
        }
        _mm512_mask_storeu_ps(y0 + ox, tm, a0);
      }
    }
  }
}

}  // namespace

void conv3x3_fwd(const float* x, int cin, int h, int w, const float* wts, const float* bias,
                 int cout, int stride, float* y) {
  if (stride != 1) {
    generic::conv3x3_fwd(x, cin, h, w, wts, bias, cout, stride, y);
    return;
  }
  conv_core<false>(pad3(x, cin, h, w), cin, h, w, wts, bias, cout, y);
}

void conv3x3_bwd_data(const float* dy, int cout, const float* wts, int cin, int h, int w,
                      int stride, float* dx_accum) {
  if (stride != 1) {
    generic::conv3x3_bwd_data(dy, cout, wts, cin, h, w, stride, dx_accum);
    return;
  }
  tl_wflip.resize(static_cast<size_t>(cin) * cout * 9);
  float* wf = tl_wflip.data();
  for (int ci = 0; ci < cin; ++ci)
    for (int co = 0; co < cout; ++co)
      for (int k = 0; k < 9; ++k)
        wf[(static_cast<size_t>(ci) * cout + co) * 9 + k] =
            wts[(static_cast<size_t>(co) * cin + ci) * 9 + (8 - k)];
  conv_core<true>(pad3(dy, cout, h, w), cout, h, w, wf, nullptr, cin, dx_accum);
}

void conv3x3_bwd_wts(const float* x, int cin, int h, int w, const float* dy, int cout, int stride,
                     float* dw_accum, float* db_accum) {
  if (stride != 1) {
    generic::conv3x3_bwd_wts(x, cin, h, w, dy, cout, stride, dw_accum, db_accum);
    return;
  }
  const float* xpad = pad3(x, cin, h, w);
  const int wp = w + 2, hp = h + 2;
  for (int co = 0; co < cout; ++co) {
    const float* dyp = dy + static_cast<size_t>(co) * h * w;
    double bs = 0.0;
    for (int64_t i = 0, nn = static_cast<int64_t>(h) * w; i < nn; ++i) bs += dyp[i];
    db_accum[co] += static_cast<float>(bs);
    for (int ci = 0; ci < cin; ++ci) {
      __m512 acc[9];
      for (auto& a : acc) a = _mm512_setzero_ps();
      for (int oy = 0; oy < h; ++oy) {
        const float* dyrow = dyp + static_cast<size_t>(oy) * w;
        const float* base = xpad + (static_cast<size_t>(ci) * hp + oy) * wp;
        for (int ox = 0; ox < w; ox += 16) {
          const int rem = w - ox;
          const __mmask16 tm =
              rem >= 16 ? static_cast<__mmask16>(0xffff) : static_cast<__mmask16>((1u << rem) - 1u);
          const __m512 g = _mm512_maskz_loadu_ps(tm, dyrow + ox);
#pragma GCC unroll 9
          for (int k = 0; k < 9; ++k)
            acc[k] = _mm512_fmadd_ps(_mm512_maskz_loadu_ps(tm, base + (k / 3) * wp + (k % 3) + ox),
                                     g, acc[k]);
        }
      }
      float* dwk = dw_accum + (static_cast<size_t>(co) * cin + ci) * 9;
      for (int k = 0; k < 9; ++k) dwk[k] += _mm512_reduce_add_ps(acc[k]);
    }
  }
}

}  // namespace rsrlab::kernels::avx512
