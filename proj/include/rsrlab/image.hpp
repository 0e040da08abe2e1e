#pragma once

#include "rsrlab/errors.hpp"
#include "rsrlab/tensor.hpp"

namespace rsrlab {

// Pixel container. Planar (C, H, W) float storage, values nominally in [0,1];
// ops that synthesize pixels clamp, intermediate math may leave the range.
struct Image {
  TensorF px;  // (C, H, W)

  Image() = default;
  Image(int c, int h, int w) : px({c, h, w}) {}
  explicit Image(TensorF t) : px(std::move(t)) {
    if (px.ndim() != 3) throw DimensionError("Image expects a rank-3 (C,H,W) tensor");
  }

  int channels() const { return px.dim(0); }
  int height() const { return px.dim(1); }
  int width() const { return px.dim(2); }
  bool empty() const { return px.empty(); }

  float& at(int c, int y, int x) { return px.at(c, y, x); }
  float at(int c, int y, int x) const { return px.at(c, y, x); }
};

// Aligned HR/LR crop pair; hr dims are exactly scale x lr dims.
struct PatchPair {
  Image hr;
  Image lr;
  int scale = 1;

  void check() const {
    if (hr.channels() != lr.channels()) throw DimensionError("PatchPair channel mismatch");
    if (hr.height() != scale * lr.height() || hr.width() != scale * lr.width())
      throw DimensionError("PatchPair dims are not scale-consistent");
  }
};

}  // namespace rsrlab
