// Runtime dispatch between the scalar reference kernels and the SIMD
// variants, plus the double overloads (always reference path).

#include "rsrlab/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "kernels_generic.hpp"

namespace rsrlab::kernels {

SimdLevel detect_level() {
  const char* env = std::getenv("RSRLAB_NO_SIMD");
  if (env && std::strcmp(env, "0") != 0) return SimdLevel::scalar;
  if (avx512::supported()) return SimdLevel::avx512;
  if (avx2::supported()) return SimdLevel::avx2;
  return SimdLevel::scalar;
}

namespace {
SimdLevel g_level = detect_level();
}

SimdLevel active_level() { return g_level; }

void set_level(SimdLevel lvl) {
  const SimdLevel cap = detect_level();
  g_level = static_cast<int>(lvl) > static_cast<int>(cap) ? cap : lvl;
}

const char* level_name(SimdLevel lvl) {
  switch (lvl) {
    case SimdLevel::avx512: return "avx512";
    case SimdLevel::avx2: return "avx2";
    default: return "scalar";
  }
}

// ---- float entry points ----

void conv3x3_fwd(const float* x, int cin, int h, int w, const float* wts, const float* bias,
                 int cout, int stride, float* y) {
  switch (g_level) {
    case SimdLevel::avx512: avx512::conv3x3_fwd(x, cin, h, w, wts, bias, cout, stride, y); return;
    case SimdLevel::avx2: avx2::conv3x3_fwd(x, cin, h, w, wts, bias, cout, stride, y); return;
    default: generic::conv3x3_fwd(x, cin, h, w, wts, bias, cout, stride, y); return;
  }
}

void conv3x3_bwd_data(const float* dy, int cout, const float* wts, int cin, int h, int w,
                      int stride, float* dx_accum) {
  switch (g_level) {
    case SimdLevel::avx512:
      avx512::conv3x3_bwd_data(dy, cout, wts, cin, h, w, stride, dx_accum);
      return;
    case SimdLevel::avx2: avx2::conv3x3_bwd_data(dy, cout, wts, cin, h, w, stride, dx_accum); return;
    default: generic::conv3x3_bwd_data(dy, cout, wts, cin, h, w, stride, dx_accum); return;
  }
}

void conv3x3_bwd_wts(const float* x, int cin, int h, int w, const float* dy, int cout, int stride,
                     float* dw_accum, float* db_accum) {
  switch (g_level) {
    case SimdLevel::avx512:
      avx512::conv3x3_bwd_wts(x, cin, h, w, dy, cout, stride, dw_accum, db_accum);
      return;
    case SimdLevel::avx2:
      avx2::conv3x3_bwd_wts(x, cin, h, w, dy, cout, stride, dw_accum, db_accum);
      return;
    default:
      generic::conv3x3_bwd_wts(x, cin, h, w, dy, cout, stride, dw_accum, db_accum);
      return;
  }
}

void lrelu_fwd(const float* x, float* y, int64_t n, float slope) {
  if (g_level != SimdLevel::scalar) return avx2::lrelu_fwd(x, y, n, slope);
  generic::lrelu_fwd(x, y, n, slope);
}

void lrelu_bwd(const float* y, const float* dy, float* dx_accum, int64_t n, float slope) {
  if (g_level != SimdLevel::scalar) return avx2::lrelu_bwd(y, dy, dx_accum, n, slope);
  generic::lrelu_bwd(y, dy, dx_accum, n, slope);
}

// pure shuffles; the compiler vectorizes these fine
void nn_up2_fwd(const float* x, int c, int h, int w, float* y) { generic::nn_up2_fwd(x, c, h, w, y); }
void nn_up2_bwd(const float* dy, int c, int h, int w, float* dx_accum) {
  generic::nn_up2_bwd(dy, c, h, w, dx_accum);
}
void avgpool2_fwd(const float* x, int c, int h, int w, float* y) {
  generic::avgpool2_fwd(x, c, h, w, y);
}
void avgpool2_bwd(const float* dy, int c, int h, int w, float* dx_accum) {
  generic::avgpool2_bwd(dy, c, h, w, dx_accum);
}

void axpy(int64_t n, float a, const float* x, float* y) {
  if (g_level != SimdLevel::scalar) return avx2::axpy(n, a, x, y);
  generic::axpy(n, a, x, y);
}

void vscale(int64_t n, float a, float* x) {
  if (g_level != SimdLevel::scalar) return avx2::vscale(n, a, x);
  generic::vscale(n, a, x);
}

void add_scalar(int64_t n, float a, float* x) {
  if (g_level != SimdLevel::scalar) return avx2::add_scalar(n, a, x);
  generic::add_scalar(n, a, x);
}

double vsum(const float* x, int64_t n) {
  if (g_level != SimdLevel::scalar) return avx2::vsum(x, n);
  return generic::vsum(x, n);
}

double dot(const float* a, const float* b, int64_t n) {
  if (g_level != SimdLevel::scalar) return avx2::dot(a, b, n);
  return generic::dot(a, b, n);
}

double sumabsdiff(const float* a, const float* b, int64_t n) {
  if (g_level != SimdLevel::scalar) return avx2::sumabsdiff(a, b, n);
  return generic::sumabsdiff(a, b, n);
}

double sumsqdiff(const float* a, const float* b, int64_t n) {
  if (g_level != SimdLevel::scalar) return avx2::sumsqdiff(a, b, n);
  return generic::sumsqdiff(a, b, n);
}

void signdiff_accum(const float* a, const float* b, float coeff, float* da, int64_t n) {
  if (g_level != SimdLevel::scalar) return avx2::signdiff_accum(a, b, coeff, da, n);
  generic::signdiff_accum(a, b, coeff, da, n);
}

void adam_step(int64_t n, float* p, float* m, float* v, const float* g, float lr, float b1,
               float b2, float eps, float bc1, float bc2) {
  if (g_level != SimdLevel::scalar) return avx2::adam_step(n, p, m, v, g, lr, b1, b2, eps, bc1, bc2);
  generic::adam_step(n, p, m, v, g, lr, b1, b2, eps, bc1, bc2);
}

void project_box(int64_t n, float* x, const float* x0, double eps) {
  // always the reference path: the rounding guarantees matter more than the
  // vector throughput here (projection is a sliver of attack runtime)
  generic::project_box(n, x, x0, eps);
}

void sign_ascent(int64_t n, float* x, const float* g, float alpha) {
  if (g_level != SimdLevel::scalar) return avx2::sign_ascent(n, x, g, alpha);
  generic::sign_ascent(n, x, g, alpha);
}

void clamp01(float* x, int64_t n) {
  if (g_level != SimdLevel::scalar) return avx2::clamp01(x, n);
  generic::clamp01(x, n);
}

// ---- double entry points: always the reference implementation ----

void conv3x3_fwd(const double* x, int cin, int h, int w, const double* wts, const double* bias,
                 int cout, int stride, double* y) {
  generic::conv3x3_fwd(x, cin, h, w, wts, bias, cout, stride, y);
}
void conv3x3_bwd_data(const double* dy, int cout, const double* wts, int cin, int h, int w,
                      int stride, double* dx_accum) {
  generic::conv3x3_bwd_data(dy, cout, wts, cin, h, w, stride, dx_accum);
}
void conv3x3_bwd_wts(const double* x, int cin, int h, int w, const double* dy, int cout, int stride,
                     double* dw_accum, double* db_accum) {
  generic::conv3x3_bwd_wts(x, cin, h, w, dy, cout, stride, dw_accum, db_accum);
}
void lrelu_fwd(const double* x, double* y, int64_t n, double slope) {
  generic::lrelu_fwd(x, y, n, slope);
}
void lrelu_bwd(const double* y, const double* dy, double* dx_accum, int64_t n, double slope) {
  generic::lrelu_bwd(y, dy, dx_accum, n, slope);
}
void nn_up2_fwd(const double* x, int c, int h, int w, double* y) {
  generic::nn_up2_fwd(x, c, h, w, y);
}
void nn_up2_bwd(const double* dy, int c, int h, int w, double* dx_accum) {
  generic::nn_up2_bwd(dy, c, h, w, dx_accum);
}
void avgpool2_fwd(const double* x, int c, int h, int w, double* y) {
  generic::avgpool2_fwd(x, c, h, w, y);
}
void avgpool2_bwd(const double* dy, int c, int h, int w, double* dx_accum) {
  generic::avgpool2_bwd(dy, c, h, w, dx_accum);
}
void axpy(int64_t n, double a, const double* x, double* y) { generic::axpy(n, a, x, y); }
void vscale(int64_t n, double a, double* x) { generic::vscale(n, a, x); }
void add_scalar(int64_t n, double a, double* x) { generic::add_scalar(n, a, x); }
double vsum(const double* x, int64_t n) { return generic::vsum(x, n); }
double dot(const double* a, const double* b, int64_t n) { return generic::dot(a, b, n); }
double sumabsdiff(const double* a, const double* b, int64_t n) {
  return generic::sumabsdiff(a, b, n);
}
double sumsqdiff(const double* a, const double* b, int64_t n) {
  return generic::sumsqdiff(a, b, n);
}
void signdiff_accum(const double* a, const double* b, double coeff, double* da, int64_t n) {
  generic::signdiff_accum(a, b, coeff, da, n);
}
void adam_step(int64_t n, double* p, double* m, double* v, const double* g, double lr, double b1,
               double b2, double eps, double bc1, double bc2) {
  generic::adam_step(n, p, m, v, g, lr, b1, b2, eps, bc1, bc2);
}
void project_box(int64_t n, double* x, const double* x0, double eps) {
  generic::project_box(n, x, x0, eps);
}
void sign_ascent(int64_t n, double* x, const double* g, double alpha) {
  generic::sign_ascent(n, x, g, alpha);
}
void clamp01(double* x, int64_t n) { generic::clamp01(x, n); }

}  // namespace rsrlab::kernels
