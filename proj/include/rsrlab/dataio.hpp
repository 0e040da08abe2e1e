#pragma once

#include <string>
#include <vector>

#include "rsrlab/image.hpp"

namespace rsrlab {

// Synthetic corruption used only at evaluation time, never during training.
struct CorruptionSpec {
  enum class Kind { gaussian, salt_pepper, quantize };
  Kind kind = Kind::gaussian;
  double strength = 0.0;  // sigma / flip probability / level count
  uint64_t seed = 0;

  void validate() const;
  std::string label() const;  // e.g. "gaussian:0.04"
  static CorruptionSpec parse(const std::string& text, uint64_t seed);
};

// PNG I/O. Reads 8- or 16-bit grayscale or RGB; anything else is a
// FormatError. Writes clamped 8-bit.
Image load_image(const std::string& path);
void save_image(const Image& img, const std::string& path);

// Anti-aliased separable bicubic (a = -0.5), kernel support widened by the
// scale factor, symmetric edge reflection, weights renormalized per tap set,
// output clamped to [0,1]. Dims must be divisible by s.
Image bicubic_downsample(const Image& img, int s);

// Deterministic grid of size x size crops at the given stride; the last
// row/column is anchored to the image edge. Row-major order. The seed is
// accepted for interface stability but the grid does not use it.
std::vector<Image> crop_patches(const Image& img, int size, int stride, uint64_t seed);

PatchPair make_pair(const Image& hr, int s);

Image degrade(const Image& img, const CorruptionSpec& spec);

}  // namespace rsrlab
