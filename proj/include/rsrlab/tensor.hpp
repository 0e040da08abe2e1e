#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "rsrlab/errors.hpp"

namespace rsrlab {

// Dense row-major tensor, up to 4 dims. Images and activations use (C, H, W),
// conv weights (Cout, Cin, Kh, Kw).
template <typename T>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::initializer_list<int> dims) { reshape(dims); }

  void reshape(std::initializer_list<int> dims) {
    ndim_ = 0;
    int64_t n = 1;
    for (int d : dims) {
      if (d <= 0) throw DimensionError("tensor dims must be positive");
      if (ndim_ >= 4) throw DimensionError("tensor rank > 4");
      dim_[ndim_++] = d;
      n *= d;
    }
    v_.assign(static_cast<size_t>(n), T(0));
  }

  int ndim() const { return ndim_; }
  int dim(int i) const { return dim_[i]; }
  int64_t size() const { return static_cast<int64_t>(v_.size()); }
  bool empty() const { return v_.empty(); }

  T* data() { return v_.data(); }
  const T* data() const { return v_.data(); }

  T& operator[](int64_t i) { return v_[static_cast<size_t>(i)]; }
  const T& operator[](int64_t i) const { return v_[static_cast<size_t>(i)]; }

  // (c, y, x) accessor for rank-3 tensors
  T& at(int c, int y, int x) { return v_[(static_cast<size_t>(c) * dim_[1] + y) * dim_[2] + x]; }
  const T& at(int c, int y, int x) const {
    return v_[(static_cast<size_t>(c) * dim_[1] + y) * dim_[2] + x];
  }

  void zero() { std::fill(v_.begin(), v_.end(), T(0)); }

  bool same_shape(const Tensor& o) const {
    if (ndim_ != o.ndim_) return false;
    for (int i = 0; i < ndim_; ++i)
      if (dim_[i] != o.dim_[i]) return false;
    return true;
  }

  std::vector<T>& vec() { return v_; }
  const std::vector<T>& vec() const { return v_; }

 private:
  std::array<int, 4> dim_{1, 1, 1, 1};
  int ndim_ = 0;
  std::vector<T> v_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace rsrlab
