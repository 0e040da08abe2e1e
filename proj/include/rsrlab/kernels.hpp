#pragma once

#include <cstdint>

// Arithmetic inner loops. Each kernel has a scalar reference implementation
// (kernels::generic, templated on float/double) and SIMD variants for float
// (kernels::avx2, kernels::avx512). The float entry points below dispatch on
// the level picked at startup from CPUID; RSRLAB_NO_SIMD=1 forces scalar.
// Double entry points always run the reference path.
//
// Convolutions are 3x3 with zero padding 1 and stride 1 or 2. Backward
// kernels accumulate (+=) into their output buffers so branching graphs can
// sum gradients in place; callers zero the buffers once per pass.

namespace rsrlab::kernels {

enum class SimdLevel { scalar = 0, avx2 = 1, avx512 = 2 };

SimdLevel detect_level();        // CPUID + RSRLAB_NO_SIMD
SimdLevel active_level();
void set_level(SimdLevel lvl);   // clamped to detect_level()
const char* level_name(SimdLevel lvl);

constexpr int conv_out(int n, int stride) { return (n - 1) / stride + 1; }

// ---- float entry points (dispatched) ----

void conv3x3_fwd(const float* x, int cin, int h, int w, const float* wts, const float* bias,
                 int cout, int stride, float* y);
void conv3x3_bwd_data(const float* dy, int cout, const float* wts, int cin, int h, int w,
                      int stride, float* dx_accum);
void conv3x3_bwd_wts(const float* x, int cin, int h, int w, const float* dy, int cout, int stride,
                     float* dw_accum, float* db_accum);

void lrelu_fwd(const float* x, float* y, int64_t n, float slope);
void lrelu_bwd(const float* y, const float* dy, float* dx_accum, int64_t n, float slope);

void nn_up2_fwd(const float* x, int c, int h, int w, float* y);
void nn_up2_bwd(const float* dy, int c, int h, int w, float* dx_accum);
void avgpool2_fwd(const float* x, int c, int h, int w, float* y);
void avgpool2_bwd(const float* dy, int c, int h, int w, float* dx_accum);

void axpy(int64_t n, float a, const float* x, float* y);  // y += a*x
void vscale(int64_t n, float a, float* x);
void add_scalar(int64_t n, float a, float* x);
double vsum(const float* x, int64_t n);
double dot(const float* a, const float* b, int64_t n);
double sumabsdiff(const float* a, const float* b, int64_t n);
double sumsqdiff(const float* a, const float* b, int64_t n);
// da += coeff * sign(a - b), sign(0) = 0
void signdiff_accum(const float* a, const float* b, float coeff, float* da, int64_t n);

// bias-corrected Adam; bc1 = 1/(1-b1^t), bc2 = 1/(1-b2^t)
void adam_step(int64_t n, float* p, float* m, float* v, const float* g, float lr, float b1,
               float b2, float eps, float bc1, float bc2);

// Elementwise clamp of x to [max(0, x0-eps), min(1, x0+eps)]. The float
// variant computes bounds in double and rounds them toward the interior, so
// |x - x0| <= eps holds exactly when measured in double; it is deliberately
// scalar-only (precision-critical, negligible runtime share).
void project_box(int64_t n, float* x, const float* x0, double eps);
// x += alpha * sign(g), sign(0) = 0
void sign_ascent(int64_t n, float* x, const float* g, float alpha);
void clamp01(float* x, int64_t n);

// ---- double entry points (reference path) ----

void conv3x3_fwd(const double* x, int cin, int h, int w, const double* wts, const double* bias,
                 int cout, int stride, double* y);
void conv3x3_bwd_data(const double* dy, int cout, const double* wts, int cin, int h, int w,
                      int stride, double* dx_accum);
void conv3x3_bwd_wts(const double* x, int cin, int h, int w, const double* dy, int cout,
                     int stride, double* dw_accum, double* db_accum);
void lrelu_fwd(const double* x, double* y, int64_t n, double slope);
void lrelu_bwd(const double* y, const double* dy, double* dx_accum, int64_t n, double slope);
void nn_up2_fwd(const double* x, int c, int h, int w, double* y);
void nn_up2_bwd(const double* dy, int c, int h, int w, double* dx_accum);
void avgpool2_fwd(const double* x, int c, int h, int w, double* y);
void avgpool2_bwd(const double* dy, int c, int h, int w, double* dx_accum);
void axpy(int64_t n, double a, const double* x, double* y);
void vscale(int64_t n, double a, double* x);
void add_scalar(int64_t n, double a, double* x);
double vsum(const double* x, int64_t n);
double dot(const double* a, const double* b, int64_t n);
double sumabsdiff(const double* a, const double* b, int64_t n);
double sumsqdiff(const double* a, const double* b, int64_t n);
void signdiff_accum(const double* a, const double* b, double coeff, double* da, int64_t n);
void adam_step(int64_t n, double* p, double* m, double* v, const double* g, double lr, double b1,
               double b2, double eps, double bc1, double bc2);
void project_box(int64_t n, double* x, const double* x0, double eps);
void sign_ascent(int64_t n, double* x, const double* g, double alpha);
void clamp01(double* x, int64_t n);

// ---- per-ISA implementations, exposed for equivalence tests ----

namespace avx2 {
bool supported();
void conv3x3_fwd(const float* x, int cin, int h, int w, const float* wts, const float* bias,
                 int cout, int stride, float* y);
void conv3x3_bwd_data(const float* dy, int cout, const float* wts, int cin, int h, int w,
                      int stride, float* dx_accum);
void conv3x3_bwd_wts(const float* x, int cin, int h, int w, const float* dy, int cout, int stride,
                     float* dw_accum, float* db_accum);
void lrelu_fwd(const float* x, float* y, int64_t n, float slope);
void lrelu_bwd(const float* y, const float* dy, float* dx_accum, int64_t n, float slope);
void axpy(int64_t n, float a, const float* x, float* y);
void vscale(int64_t n, float a, float* x);
void add_scalar(int64_t n, float a, float* x);
double vsum(const float* x, int64_t n);
double dot(const float* a, const float* b, int64_t n);
double sumabsdiff(const float* a, const float* b, int64_t n);
double sumsqdiff(const float* a, const float* b, int64_t n);
void signdiff_accum(const float* a, const float* b, float coeff, float* da, int64_t n);
void adam_step(int64_t n, float* p, float* m, float* v, const float* g, float lr, float b1,
               float b2, float eps, float bc1, float bc2);
void sign_ascent(int64_t n, float* x, const float* g, float alpha);
void clamp01(float* x, int64_t n);
}  // namespace avx2

namespace avx512 {
bool supported();
void conv3x3_fwd(const float* x, int cin, int h, int w, const float* wts, const float* bias,
                 int cout, int stride, float* y);
void conv3x3_bwd_data(const float* dy, int cout, const float* wts, int cin, int h, int w,
                      int stride, float* dx_accum);
void conv3x3_bwd_wts(const float* x, int cin, int h, int w, const float* dy, int cout, int stride,
                     float* dw_accum, float* db_accum);
}  // namespace avx512

}  // namespace rsrlab::kernels
