// AVX2/FMA variants of the float kernels. Compiled with -mavx2 -mfma; only
// reached after runtime CPUID dispatch. Convolutions copy the input into a
// zero-padded scratch once per call so the inner loops carry no edge branches.

#include <immintrin.h>

#include <cstring>
#include <vector>

#include "rsrlab/kernels.hpp"
#include "kernels_generic.hpp"

namespace rsrlab::kernels::avx2 {

bool supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

thread_local std::vector<float> tl_pad;
thread_local std::vector<float> tl_wflip;

// copy (c, h, w) into a (c, h+2, w+2) zero-bordered scratch
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

inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  lo = _mm_add_ps(lo, _mm_movehl_ps(lo, lo));
  lo = _mm_add_ss(lo, _mm_shuffle_ps(lo, lo, 1));
  return _mm_cvtss_f32(lo);
}

inline double hsumd(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// stride-1 3x3 conv on a padded input; Acc accumulates into y instead of
// initializing from bias. Register-blocked 2 output channels x 16 columns.
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
        __m256 a0, a1, c0, c1;
        if constexpr (Acc) {
          a0 = _mm256_loadu_ps(y0 + ox);
          a1 = _mm256_loadu_ps(y0 + ox + 8);
          c0 = _mm256_loadu_ps(y1 + ox);
          c1 = _mm256_loadu_ps(y1 + ox + 8);
        } else {
          a0 = a1 = _mm256_set1_ps(b0s);
          c0 = c1 = _mm256_set1_ps(b1s);
        }
        for (int ci = 0; ci < cin; ++ci) {
          const float* base = xrow(ci, oy) + ox;
          const float* wc0 = w0 + ci * 9;
          const float* wc1 = w1 + ci * 9;
#pragma GCC unroll 9
          for (int k = 0; k < 9; ++k) {
            const float* px = base + (k / 3) * wp + (k % 3);
            const __m256 x0 = _mm256_loadu_ps(px);
            const __m256 x1 = _mm256_loadu_ps(px + 8);
            const __m256 wv0 = _mm256_broadcast_ss(wc0 + k);
            const __m256 wv1 = _mm256_broadcast_ss(wc1 + k);
            a0 = _mm256_fmadd_ps(x0, wv0, a0);
            a1 = _mm256_fmadd_ps(x1, wv0, a1);
            c0 = _mm256_fmadd_ps(x0, wv1, c0);
            c1 = _mm256_fmadd_ps(x1, wv1, c1);
          }
        }
        _mm256_storeu_ps(y0 + ox, a0);
        _mm256_storeu_ps(y0 + ox + 8, a1);
        _mm256_storeu_ps(y1 + ox, c0);
        _mm256_storeu_ps(y1 + ox + 8, c1);
      }
      for (; ox + 8 <= w; ox += 8) {
        __m256 a0, c0;
        if constexpr (Acc) {
          a0 = _mm256_loadu_ps(y0 + ox);
          c0 = _mm256_loadu_ps(y1 + ox);
        } else {
          a0 = _mm256_set1_ps(b0s);
          c0 = _mm256_set1_ps(b1s);
        }
        for (int ci = 0; ci < cin; ++ci) {
          const float* base = xrow(ci, oy) + ox;
          const float* wc0 = w0 + ci * 9;
          const float* wc1 = w1 + ci * 9;
#pragma GCC unroll 9
          for (int k = 0; k < 9; ++k) {
            const __m256 x0 = _mm256_loadu_ps(base + (k / 3) * wp + (k % 3));
            a0 = _mm256_fmadd_ps(x0, _mm256_broadcast_ss(wc0 + k), a0);
            c0 = _mm256_fmadd_ps(x0, _mm256_broadcast_ss(wc1 + k), c0);
          }
        }
        _mm256_storeu_ps(y0 + ox, a0);
        _mm256_storeu_ps(y1 + ox, c0);
      }
      for (; ox < w; ++ox) {
        float a = Acc ? y0[ox] : b0s;
        float c = Acc ? y1[ox] : b1s;
        for (int ci = 0; ci < cin; ++ci) {
          const float* base = xrow(ci, oy) + ox;
          const float* wc0 = w0 + ci * 9;
          const float* wc1 = w1 + ci * 9;
          for (int k = 0; k < 9; ++k) {
            const float xv = base[(k / 3) * wp + (k % 3)];
            a += xv * wc0[k];
            c += xv * wc1[k];
          }
        }
        y0[ox] = a;
        y1[ox] = c;
      }
    }
  }
  if (co < cout) {
    const float* w0 = wts + static_cast<size_t>(co) * cin * 9;
    const float b0s = bias ? bias[co] : 0.f;
    for (int oy = 0; oy < h; ++oy) {
      float* y0 = y + (static_cast<size_t>(co) * h + oy) * w;
      int ox = 0;
      for (; ox + 8 <= w; ox += 8) {
        __m256 a0 = Acc ? _mm256_loadu_ps(y0 + ox) : _mm256_set1_ps(b0s);
        for (int ci = 0; ci < cin; ++ci) {
          const float* base = xrow(ci, oy) + ox;
          const float* wc0 = w0 + ci * 9;
#pragma GCC unroll 9
          for (int k = 0; k < 9; ++k) {
            const __m256 x0 = _mm256_loadu_ps(base + (k / 3) * wp + (k % 3));
            a0 = _mm256_fmadd_ps(x0, _mm256_broadcast_ss(wc0 + k), a0);
          }
        }
        _mm256_storeu_ps(y0 + ox, a0);
      }
      for (; ox < w; ++ox) {
        float a = Acc ? y0[ox] : b0s;
        for (int ci = 0; ci < cin; ++ci) {
          const float* base = xrow(ci, oy) + ox;
          const float* wc0 = w0 + ci * 9;
          for (int k = 0; k < 9; ++k) a += base[(k / 3) * wp + (k % 3)] * wc0[k];
        }
        y0[ox] = a;
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

// dx = full correlation of dy with the kernel flipped and channels swapped;
// reuses the forward core in accumulate mode
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
    db_accum[co] += static_cast<float>(vsum(dyp, static_cast<int64_t>(h) * w));
    for (int ci = 0; ci < cin; ++ci) {
      __m256 acc[9];
      for (auto& a : acc) a = _mm256_setzero_ps();
      float tail[9] = {0};
      for (int oy = 0; oy < h; ++oy) {
        const float* dyrow = dyp + static_cast<size_t>(oy) * w;
        const float* base = xpad + (static_cast<size_t>(ci) * hp + oy) * wp;
        int ox = 0;
        for (; ox + 8 <= w; ox += 8) {
          const __m256 g = _mm256_loadu_ps(dyrow + ox);
#pragma GCC unroll 9
          for (int k = 0; k < 9; ++k)
            acc[k] = _mm256_fmadd_ps(_mm256_loadu_ps(base + (k / 3) * wp + (k % 3) + ox), g, acc[k]);
        }
        for (; ox < w; ++ox) {
          const float g = dyrow[ox];
          for (int k = 0; k < 9; ++k) tail[k] += base[(k / 3) * wp + (k % 3) + ox] * g;
        }
      }
      float* dwk = dw_accum + (static_cast<size_t>(co) * cin + ci) * 9;
      for (int k = 0; k < 9; ++k) dwk[k] += hsum(acc[k]) + tail[k];
    }
  }
}

void lrelu_fwd(const float* x, float* y, int64_t n, float slope) {
  const __m256 s = _mm256_set1_ps(slope);
  const __m256 z = _mm256_setzero_ps();
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(x + i);
    const __m256 neg = _mm256_mul_ps(v, s);
    _mm256_storeu_ps(y + i, _mm256_blendv_ps(neg, v, _mm256_cmp_ps(v, z, _CMP_GT_OQ)));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.f ? x[i] : slope * x[i];
}

void lrelu_bwd(const float* y, const float* dy, float* dx_accum, int64_t n, float slope) {
  const __m256 s = _mm256_set1_ps(slope);
  const __m256 one = _mm256_set1_ps(1.f);
  const __m256 z = _mm256_setzero_ps();
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 yv = _mm256_loadu_ps(y + i);
    const __m256 f = _mm256_blendv_ps(s, one, _mm256_cmp_ps(yv, z, _CMP_GT_OQ));
    const __m256 d = _mm256_loadu_ps(dx_accum + i);
    _mm256_storeu_ps(dx_accum + i, _mm256_fmadd_ps(_mm256_loadu_ps(dy + i), f, d));
  }
  for (; i < n; ++i) dx_accum[i] += dy[i] * (y[i] > 0.f ? 1.f : slope);
}

void axpy(int64_t n, float a, const float* x, float* y) {
  const __m256 av = _mm256_set1_ps(a);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(av, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void vscale(int64_t n, float a, float* x) {
  const __m256 av = _mm256_set1_ps(a);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) _mm256_storeu_ps(x + i, _mm256_mul_ps(av, _mm256_loadu_ps(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void add_scalar(int64_t n, float a, float* x) {
  const __m256 av = _mm256_set1_ps(a);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) _mm256_storeu_ps(x + i, _mm256_add_ps(av, _mm256_loadu_ps(x + i)));
  for (; i < n; ++i) x[i] += a;
}

namespace {
// promote the 8 float lanes to two double quads and add into acc
inline void addwide(__m256d& acc0, __m256d& acc1, __m256 v) {
  acc0 = _mm256_add_pd(acc0, _mm256_cvtps_pd(_mm256_castps256_ps128(v)));
  acc1 = _mm256_add_pd(acc1, _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1)));
}
}  // namespace

double vsum(const float* x, int64_t n) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) addwide(a0, a1, _mm256_loadu_ps(x + i));
  double s = hsumd(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot(const float* a, const float* b, int64_t n) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  int64_t i = 0;
  for (; i + 8 <= n; i += 8)
    addwide(a0, a1, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  double s = hsumd(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += static_cast<double>(a[i]) * b[i];
  return s;
}

double sumabsdiff(const float* a, const float* b, int64_t n) {
  const __m256 absmask = _mm256_castsi256_ps(_mm256_set1_epi32(0x7fffffff));
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 d = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
    addwide(a0, a1, _mm256_and_ps(d, absmask));
  }
  double s = hsumd(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += std::abs(static_cast<double>(a[i]) - b[i]);
  return s;
}

double sumsqdiff(const float* a, const float* b, int64_t n) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 d = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
    addwide(a0, a1, _mm256_mul_ps(d, d));
  }
  double s = hsumd(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return s;
}

void signdiff_accum(const float* a, const float* b, float coeff, float* da, int64_t n) {
  const __m256 cv = _mm256_set1_ps(coeff);
  const __m256 z = _mm256_setzero_ps();
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 d = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
    const __m256 pos = _mm256_and_ps(_mm256_cmp_ps(d, z, _CMP_GT_OQ), cv);
    const __m256 neg = _mm256_and_ps(_mm256_cmp_ps(d, z, _CMP_LT_OQ), cv);
    _mm256_storeu_ps(da + i, _mm256_add_ps(_mm256_loadu_ps(da + i), _mm256_sub_ps(pos, neg)));
  }
  for (; i < n; ++i) {
    const float d = a[i] - b[i];
    da[i] += d > 0.f ? coeff : (d < 0.f ? -coeff : 0.f);
  }
}

void adam_step(int64_t n, float* p, float* m, float* v, const float* g, float lr, float b1,
               float b2, float eps, float bc1, float bc2) {
  const __m256 b1v = _mm256_set1_ps(b1), ob1 = _mm256_set1_ps(1.f - b1);
  const __m256 b2v = _mm256_set1_ps(b2), ob2 = _mm256_set1_ps(1.f - b2);
  const __m256 lrv = _mm256_set1_ps(lr), epsv = _mm256_set1_ps(eps);
  const __m256 bc1v = _mm256_set1_ps(bc1), bc2v = _mm256_set1_ps(bc2);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 gv = _mm256_loadu_ps(g + i);
    const __m256 mv = _mm256_fmadd_ps(b1v, _mm256_loadu_ps(m + i), _mm256_mul_ps(ob1, gv));
    const __m256 vv =
        _mm256_fmadd_ps(b2v, _mm256_loadu_ps(v + i), _mm256_mul_ps(ob2, _mm256_mul_ps(gv, gv)));
    _mm256_storeu_ps(m + i, mv);
    _mm256_storeu_ps(v + i, vv);
    const __m256 den = _mm256_add_ps(_mm256_sqrt_ps(_mm256_mul_ps(vv, bc2v)), epsv);
    const __m256 step = _mm256_div_ps(_mm256_mul_ps(lrv, _mm256_mul_ps(mv, bc1v)), den);
    _mm256_storeu_ps(p + i, _mm256_sub_ps(_mm256_loadu_ps(p + i), step));
  }
  generic::adam_step(n - i, p + i, m + i, v + i, g + i, lr, b1, b2, eps, bc1, bc2);
}

void sign_ascent(int64_t n, float* x, const float* g, float alpha) {
  const __m256 av = _mm256_set1_ps(alpha);
  const __m256 z = _mm256_setzero_ps();
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 gv = _mm256_loadu_ps(g + i);
    const __m256 pos = _mm256_and_ps(_mm256_cmp_ps(gv, z, _CMP_GT_OQ), av);
    const __m256 neg = _mm256_and_ps(_mm256_cmp_ps(gv, z, _CMP_LT_OQ), av);
    _mm256_storeu_ps(x + i, _mm256_add_ps(_mm256_loadu_ps(x + i), _mm256_sub_ps(pos, neg)));
  }
  generic::sign_ascent(n - i, x + i, g + i, alpha);
}

void clamp01(float* x, int64_t n) {
  const __m256 zero = _mm256_setzero_ps(), one = _mm256_set1_ps(1.f);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(x + i, _mm256_min_ps(one, _mm256_max_ps(zero, _mm256_loadu_ps(x + i))));
  generic::clamp01(x + i, n - i);
}

}  // namespace rsrlab::kernels::avx2
