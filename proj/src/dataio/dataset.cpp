#include <cstring>

#include "rsrlab/dataio.hpp"

namespace rsrlab {

namespace {

// anchors 0, stride, 2*stride, ... with the final crop pinned to the edge
std::vector<int> anchors(int n, int size, int stride) {
  std::vector<int> a;
  for (int pos = 0;; pos += stride) {
    if (pos >= n - size) {
      a.push_back(n - size);
      break;
    }
    a.push_back(pos);
  }
  return a;
}

}  // namespace

std::vector<Image> crop_patches(const Image& img, int size, int stride, uint64_t /*seed*/) {
  if (size < 1 || stride < 1) throw ArgumentError("crop_patches: size and stride must be positive");
  const int c = img.channels(), h = img.height(), w = img.width();
  if (size > h || size > w) throw DimensionError("crop_patches: patch larger than image");

  const auto ys = anchors(h, size, stride);
  const auto xs = anchors(w, size, stride);
  std::vector<Image> out;
  out.reserve(ys.size() * xs.size());
  for (const int y0 : ys)
    for (const int x0 : xs) {
      Image p(c, size, size);
      for (int ch = 0; ch < c; ++ch)
        for (int y = 0; y < size; ++y)
          std::memcpy(&p.at(ch, y, 0), &img.px.at(ch, y0 + y, x0), sizeof(float) * size);
      out.push_back(std::move(p));
    }
  return out;
}

PatchPair make_pair(const Image& hr, int s) {
  PatchPair pp{hr, bicubic_downsample(hr, s), s};
  pp.check();
  return pp;
}

}  // namespace rsrlab
