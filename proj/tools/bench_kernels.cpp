// Micro-benchmark for the 3x3 convolution kernels at the sizes the models
// actually use. Prints GFLOP/s per simd level.

#include <chrono>
#include <cstdio>
#include <vector>

#include "rsrlab/kernels.hpp"
#include "rsrlab/rng.hpp"

namespace K = rsrlab::kernels;
using clk = std::chrono::steady_clock;

static double bench(int cin, int h, int w, int cout, int reps, int what) {
  rsrlab::Rng rng(1);
  std::vector<float> x(static_cast<size_t>(cin) * h * w), wt(static_cast<size_t>(cout) * cin * 9),
      b(cout), y(static_cast<size_t>(cout) * h * w), dx(x.size()), dw(wt.size()), db(cout);
  for (auto& v : x) v = static_cast<float>(rng.uniform());
  for (auto& v : wt) v = static_cast<float>(rng.uniform(-0.1, 0.1));
  const double flops = 2.0 * 9.0 * cin * cout * h * w;

  // warm up once, then time
  for (int it = -1; it < 0; ++it) K::conv3x3_fwd(x.data(), cin, h, w, wt.data(), b.data(), cout, 1, y.data());
  const auto t0 = clk::now();
  for (int it = 0; it < reps; ++it) {
    if (what == 0)
      K::conv3x3_fwd(x.data(), cin, h, w, wt.data(), b.data(), cout, 1, y.data());
    else if (what == 1)
      K::conv3x3_bwd_data(y.data(), cout, wt.data(), cin, h, w, 1, dx.data());
    else
      K::conv3x3_bwd_wts(x.data(), cin, h, w, y.data(), cout, 1, dw.data(), db.data());
  }
  const double sec = std::chrono::duration<double>(clk::now() - t0).count();
  return flops * reps / sec / 1e9;
}

int main() {
  struct Shape {
    int cin, h, w, cout;
  };
  const Shape shapes[] = {{16, 32, 32, 16}, {16, 32, 32, 8}, {40, 32, 32, 16},
                          {16, 128, 128, 16}, {3, 32, 32, 16}, {32, 16, 16, 64}};
  const char* names[] = {"fwd", "bwd_data", "bwd_wts"};
  for (const auto lvl : {K::SimdLevel::scalar, K::SimdLevel::avx2, K::SimdLevel::avx512}) {
    K::set_level(lvl);
    if (K::active_level() != lvl) continue;
    std::printf("== %s ==\n", K::level_name(lvl));
    for (const auto& s : shapes) {
      std::printf("  %3dx%3dx%3d -> %3d :", s.cin, s.h, s.w, s.cout);
      for (int what = 0; what < 3; ++what) {
        const int reps = lvl == K::SimdLevel::scalar ? 20 : 200;
        std::printf("  %s %6.2f GF/s", names[what], bench(s.cin, s.h, s.w, s.cout, reps, what));
      }
      std::printf("\n");
    }
  }
  return 0;
}
