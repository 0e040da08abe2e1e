#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

// Scalar reference kernels. These define the semantics the SIMD variants are
// tested against; keep them straightforward.

namespace rsrlab::kernels::generic {

template <typename T>
void conv3x3_fwd(const T* x, int cin, int h, int w, const T* wts, const T* bias, int cout,
                 int stride, T* y) {
  const int ho = (h - 1) / stride + 1;
  const int wo = (w - 1) / stride + 1;
  for (int co = 0; co < cout; ++co) {
    T* yp = y + static_cast<int64_t>(co) * ho * wo;
    const T* wc = wts + static_cast<int64_t>(co) * cin * 9;
    for (int oy = 0; oy < ho; ++oy) {
      for (int ox = 0; ox < wo; ++ox) {
        T acc = bias ? bias[co] : T(0);
        for (int ci = 0; ci < cin; ++ci) {
          const T* xp = x + static_cast<int64_t>(ci) * h * w;
          const T* wk = wc + ci * 9;
          for (int ky = 0; ky < 3; ++ky) {
            const int iy = oy * stride + ky - 1;
            if (iy < 0 || iy >= h) continue;
            for (int kx = 0; kx < 3; ++kx) {
              const int ix = ox * stride + kx - 1;
              if (ix < 0 || ix >= w) continue;
              acc += xp[static_cast<int64_t>(iy) * w + ix] * wk[ky * 3 + kx];
            }
          }
        }
        yp[static_cast<int64_t>(oy) * wo + ox] = acc;
      }
    }
  }
}

template <typename T>
void conv3x3_bwd_data(const T* dy, int cout, const T* wts, int cin, int h, int w, int stride,
                      T* dx_accum) {
  const int ho = (h - 1) / stride + 1;
  const int wo = (w - 1) / stride + 1;
  for (int co = 0; co < cout; ++co) {
    const T* dyp = dy + static_cast<int64_t>(co) * ho * wo;
    const T* wc = wts + static_cast<int64_t>(co) * cin * 9;
    for (int oy = 0; oy < ho; ++oy) {
      for (int ox = 0; ox < wo; ++ox) {
        const T g = dyp[static_cast<int64_t>(oy) * wo + ox];
        for (int ci = 0; ci < cin; ++ci) {
          T* dxp = dx_accum + static_cast<int64_t>(ci) * h * w;
          const T* wk = wc + ci * 9;
          for (int ky = 0; ky < 3; ++ky) {
            const int iy = oy * stride + ky - 1;
            if (iy < 0 || iy >= h) continue;
            for (int kx = 0; kx < 3; ++kx) {
              const int ix = ox * stride + kx - 1;
              if (ix < 0 || ix >= w) continue;
              dxp[static_cast<int64_t>(iy) * w + ix] += g * wk[ky * 3 + kx];
            }
          }
        }
      }
    }
  }
}

template <typename T>
void conv3x3_bwd_wts(const T* x, int cin, int h, int w, const T* dy, int cout, int stride,
                     T* dw_accum, T* db_accum) {
  const int ho = (h - 1) / stride + 1;
  const int wo = (w - 1) / stride + 1;
  for (int co = 0; co < cout; ++co) {
    const T* dyp = dy + static_cast<int64_t>(co) * ho * wo;
    T dbsum = T(0);
    for (int64_t i = 0; i < static_cast<int64_t>(ho) * wo; ++i) dbsum += dyp[i];
    db_accum[co] += dbsum;
    for (int ci = 0; ci < cin; ++ci) {
      const T* xp = x + static_cast<int64_t>(ci) * h * w;
      T* dwk = dw_accum + (static_cast<int64_t>(co) * cin + ci) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          T acc = T(0);
          for (int oy = 0; oy < ho; ++oy) {
            const int iy = oy * stride + ky - 1;
            if (iy < 0 || iy >= h) continue;
            for (int ox = 0; ox < wo; ++ox) {
              const int ix = ox * stride + kx - 1;
              if (ix < 0 || ix >= w) continue;
              acc += xp[static_cast<int64_t>(iy) * w + ix] * dyp[static_cast<int64_t>(oy) * wo + ox];
            }
          }
          dwk[ky * 3 + kx] += acc;
        }
      }
    }
  }
}

template <typename T>
void lrelu_fwd(const T* x, T* y, int64_t n, T slope) {
  for (int64_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : slope * x[i];
}

// slope > 0 keeps the sign of the input, so the mask comes from the output
template <typename T>
void lrelu_bwd(const T* y, const T* dy, T* dx_accum, int64_t n, T slope) {
  for (int64_t i = 0; i < n; ++i) dx_accum[i] += dy[i] * (y[i] > T(0) ? T(1) : slope);
}

template <typename T>
void nn_up2_fwd(const T* x, int c, int h, int w, T* y) {
  for (int ci = 0; ci < c; ++ci) {
    const T* xp = x + static_cast<int64_t>(ci) * h * w;
    T* yp = y + static_cast<int64_t>(ci) * 4 * h * w;
    for (int iy = 0; iy < h; ++iy) {
      for (int ix = 0; ix < w; ++ix) {
        const T v = xp[static_cast<int64_t>(iy) * w + ix];
        T* o = yp + (static_cast<int64_t>(iy) * 2) * (w * 2) + ix * 2;
        o[0] = v;
        o[1] = v;
        o[w * 2] = v;
        o[w * 2 + 1] = v;
      }
    }
  }
}

template <typename T>
void nn_up2_bwd(const T* dy, int c, int h, int w, T* dx_accum) {
  for (int ci = 0; ci < c; ++ci) {
    const T* dyp = dy + static_cast<int64_t>(ci) * 4 * h * w;
    T* dxp = dx_accum + static_cast<int64_t>(ci) * h * w;
    for (int iy = 0; iy < h; ++iy) {
      for (int ix = 0; ix < w; ++ix) {
        const T* o = dyp + (static_cast<int64_t>(iy) * 2) * (w * 2) + ix * 2;
        dxp[static_cast<int64_t>(iy) * w + ix] += o[0] + o[1] + o[w * 2] + o[w * 2 + 1];
      }
    }
  }
}

// 2x2 mean pooling; odd trailing row/col dropped
template <typename T>
void avgpool2_fwd(const T* x, int c, int h, int w, T* y) {
  const int ho = h / 2, wo = w / 2;
  for (int ci = 0; ci < c; ++ci) {
    const T* xp = x + static_cast<int64_t>(ci) * h * w;
    T* yp = y + static_cast<int64_t>(ci) * ho * wo;
    for (int oy = 0; oy < ho; ++oy) {
      for (int ox = 0; ox < wo; ++ox) {
        const T* i = xp + (static_cast<int64_t>(oy) * 2) * w + ox * 2;
        yp[static_cast<int64_t>(oy) * wo + ox] = (i[0] + i[1] + i[w] + i[w + 1]) * T(0.25);
      }
    }
  }
}

template <typename T>
void avgpool2_bwd(const T* dy, int c, int h, int w, T* dx_accum) {
  const int ho = h / 2, wo = w / 2;
  for (int ci = 0; ci < c; ++ci) {
    const T* dyp = dy + static_cast<int64_t>(ci) * ho * wo;
    T* dxp = dx_accum + static_cast<int64_t>(ci) * h * w;
    for (int oy = 0; oy < ho; ++oy) {
      for (int ox = 0; ox < wo; ++ox) {
        const T g = dyp[static_cast<int64_t>(oy) * wo + ox] * T(0.25);
        T* o = dxp + (static_cast<int64_t>(oy) * 2) * w + ox * 2;
        o[0] += g;
        o[1] += g;
        o[w] += g;
        o[w + 1] += g;
      }
    }
  }
}

template <typename T>
void axpy(int64_t n, T a, const T* x, T* y) {
  for (int64_t i = 0; i < n; ++i) y[i] += a * x[i];
}

template <typename T>
void vscale(int64_t n, T a, T* x) {
  for (int64_t i = 0; i < n; ++i) x[i] *= a;
}

template <typename T>
void add_scalar(int64_t n, T a, T* x) {
  for (int64_t i = 0; i < n; ++i) x[i] += a;
}

template <typename T>
double vsum(const T* x, int64_t n) {
  double s = 0;
  for (int64_t i = 0; i < n; ++i) s += static_cast<double>(x[i]);
  return s;
}

template <typename T>
double dot(const T* a, const T* b, int64_t n) {
  double s = 0;
  for (int64_t i = 0; i < n; ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

template <typename T>
double sumabsdiff(const T* a, const T* b, int64_t n) {
  double s = 0;
  for (int64_t i = 0; i < n; ++i) s += std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
  return s;
}

template <typename T>
double sumsqdiff(const T* a, const T* b, int64_t n) {
  double s = 0;
  for (int64_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return s;
}

template <typename T>
void signdiff_accum(const T* a, const T* b, T coeff, T* da, int64_t n) {
  for (int64_t i = 0; i < n; ++i) {
    const T d = a[i] - b[i];
    da[i] += d > T(0) ? coeff : (d < T(0) ? -coeff : T(0));
  }
}

template <typename T>
void adam_step(int64_t n, T* p, T* m, T* v, const T* g, T lr, T b1, T b2, T eps, T bc1, T bc2) {
  for (int64_t i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + (T(1) - b1) * g[i];
    v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
    p[i] -= lr * (m[i] * bc1) / (std::sqrt(v[i] * bc2) + eps);
  }
}

template <typename T>
void project_box(int64_t n, T* x, const T* x0, T eps) {
  for (int64_t i = 0; i < n; ++i) {
    const T lo = std::max(T(0), x0[i] - eps);
    const T hi = std::min(T(1), x0[i] + eps);
    x[i] = std::min(hi, std::max(lo, x[i]));
  }
}

// Float override: the naive float bounds can overshoot the ball by an ulp of
// (x0 + eps), which breaks the exact |x - x0| <= eps contract that the attack
// guarantees. Compute bounds in double and nudge the rounded float toward the
// interior when the cast landed outside.
inline void project_box(int64_t n, float* x, const float* x0, double eps) {
  for (int64_t i = 0; i < n; ++i) {
    const double c = static_cast<double>(x0[i]);
    const double lo_t = std::max(0.0, c - eps);
    const double hi_t = std::min(1.0, c + eps);
    float lo = static_cast<float>(lo_t);
    if (static_cast<double>(lo) < lo_t) lo = std::nextafterf(lo, 2.f);
    float hi = static_cast<float>(hi_t);
    if (static_cast<double>(hi) > hi_t) hi = std::nextafterf(hi, -1.f);
    x[i] = std::min(hi, std::max(lo, x[i]));
  }
}

template <typename T>
void sign_ascent(int64_t n, T* x, const T* g, T alpha) {
  for (int64_t i = 0; i < n; ++i) {
    if (g[i] > T(0))
      x[i] += alpha;
    else if (g[i] < T(0))
      x[i] -= alpha;
  }
}

template <typename T>
void clamp01(T* x, int64_t n) {
  for (int64_t i = 0; i < n; ++i) x[i] = std::min(T(1), std::max(T(0), x[i]));
}

}  // namespace rsrlab::kernels::generic
