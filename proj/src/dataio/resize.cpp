#include <cmath>
#include <vector>

#include "rsrlab/dataio.hpp"

namespace rsrlab {

namespace {

// Keys cubic, a = -0.5
double cubic(double t) {
  t = std::abs(t);
  if (t < 1.0) return 1.5 * t * t * t - 2.5 * t * t + 1.0;
  if (t < 2.0) return -0.5 * t * t * t + 2.5 * t * t - 4.0 * t + 2.0;
  return 0.0;
}

// symmetric reflection: ..., 1, 0 | 0, 1, ..., n-1 | n-1, n-2, ...
int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -1 - i;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

struct TapSet {
  int first = 0;
  std::vector<double> w;
};

// one tap set per output index along an axis of length n_in, downsampling by
// s with the kernel stretched to support 2s on each side
std::vector<TapSet> make_taps(int n_out, int s) {
  std::vector<TapSet> taps(n_out);
  for (int o = 0; o < n_out; ++o) {
    const double center = (o + 0.5) * s - 0.5;
    const int lo = static_cast<int>(std::ceil(center - 2.0 * s));
    const int hi = static_cast<int>(std::floor(center + 2.0 * s));
    auto& t = taps[o];
    t.first = lo;
    t.w.resize(hi - lo + 1);
    double sum = 0.0;
    for (int i = lo; i <= hi; ++i) {
      const double wv = cubic((i - center) / s);
      t.w[i - lo] = wv;
      sum += wv;
    }
    for (auto& wv : t.w) wv /= sum;
  }
  return taps;
}

}  // namespace

Image bicubic_downsample(const Image& img, int s) {
  if (s < 1) throw ArgumentError("bicubic_downsample: scale must be >= 1");
  const int c = img.channels(), h = img.height(), w = img.width();
  if (h % s || w % s) throw DimensionError("bicubic_downsample: dims not divisible by scale");
  if (s == 1) return img;
  const int ho = h / s, wo = w / s;

  const auto xtaps = make_taps(wo, s);
  const auto ytaps = make_taps(ho, s);

  Image out(c, ho, wo);
  std::vector<double> tmp(static_cast<size_t>(h) * wo);  // horizontal pass, one channel
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < h; ++y)
      for (int ox = 0; ox < wo; ++ox) {
        const auto& t = xtaps[ox];
        double acc = 0.0;
        for (size_t k = 0; k < t.w.size(); ++k)
          acc += t.w[k] * img.at(ch, y, reflect(t.first + static_cast<int>(k), w));
        tmp[static_cast<size_t>(y) * wo + ox] = acc;
      }
    for (int oy = 0; oy < ho; ++oy)
      for (int ox = 0; ox < wo; ++ox) {
        const auto& t = ytaps[oy];
        double acc = 0.0;
        for (size_t k = 0; k < t.w.size(); ++k)
          acc += t.w[k] * tmp[static_cast<size_t>(reflect(t.first + static_cast<int>(k), h)) * wo + ox];
        out.at(ch, oy, ox) = static_cast<float>(acc < 0.0 ? 0.0 : (acc > 1.0 ? 1.0 : acc));
      }
  }
  return out;
}

}  // namespace rsrlab
