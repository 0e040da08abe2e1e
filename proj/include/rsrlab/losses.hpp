#pragma once

#include <vector>

#include "rsrlab/model.hpp"

namespace rsrlab {

struct LossWeights {
  double w_l1 = 1.0;
  double w_percep = 1.0;
  double w_gan = 0.005;

  void validate() const;
};

// mean absolute difference
template <typename T>
double l1_loss(const Tensor<T>& a, const Tensor<T>& b) {
  if (!a.same_shape(b)) throw DimensionError("l1_loss shape mismatch");
  if (a.size() == 0) throw ArgumentError("l1_loss on empty tensors");
  return kernels::sumabsdiff(a.data(), b.data(), a.size()) / static_cast<double>(a.size());
}

// da += coeff * sign(a-b)/n
template <typename T>
void l1_loss_grad(const Tensor<T>& a, const Tensor<T>& b, T coeff, Tensor<T>& da_accum) {
  if (!a.same_shape(b) || !a.same_shape(da_accum)) throw DimensionError("l1_loss_grad shapes");
  kernels::signdiff_accum(a.data(), b.data(), coeff / static_cast<T>(a.size()), da_accum.data(),
                          a.size());
}

// sum over feature stages of mean absolute feature difference; both
// workspaces stay valid for the matching _grad call
template <typename T>
double perceptual_loss(const FeatureNet<T>& F, const Tensor<T>& sr, const Tensor<T>& hr,
                       typename FeatureNet<T>::Ws& ws_sr, typename FeatureNet<T>::Ws& ws_hr) {
  if (!sr.same_shape(hr)) throw DimensionError("perceptual_loss shape mismatch");
  F.fwd(sr, ws_sr);
  F.fwd(hr, ws_hr);
  double total = 0.0;
  for (int s = 0; s < FeatureNet<T>::kStages; ++s)
    total += kernels::sumabsdiff(ws_sr.m[s].data(), ws_hr.m[s].data(), ws_sr.m[s].size()) /
             static_cast<double>(ws_sr.m[s].size());
  return total;
}

// d(loss)/d(sr), scaled by coeff, accumulated into d_sr (caller zeroes once)
template <typename T>
void perceptual_loss_grad(FeatureNet<T>& F, typename FeatureNet<T>::Ws& ws_sr,
                          const typename FeatureNet<T>::Ws& ws_hr, T coeff,
                          Tensor<T>& d_sr_accum) {
  Tensor<T> dmaps[FeatureNet<T>::kStages];
  const Tensor<T>* ptrs[FeatureNet<T>::kStages];
  for (int s = 0; s < FeatureNet<T>::kStages; ++s) {
    auto& dm = dmaps[s];
    const auto& m = ws_sr.m[s];
    dm.reshape({m.dim(0), m.dim(1), m.dim(2)});
    dm.zero();
    kernels::signdiff_accum(m.data(), ws_hr.m[s].data(), coeff / static_cast<T>(m.size()),
                            dm.data(), m.size());
    ptrs[s] = &dm;
  }
  F.bwd(ws_sr, ptrs, d_sr_accum.data());
}

// Relativistic average GAN terms over per-image logits. The generator loss
// rewards fakes that look more realistic than the average real and penalizes
// reals that look more realistic than the average fake; the discriminator
// loss is the same expression with the roles swapped.
double gan_loss_g(const std::vector<double>& real, const std::vector<double>& fake);
double gan_loss_d(const std::vector<double>& real, const std::vector<double>& fake);
// analytic logit gradients for the two terms above (resized and overwritten)
void gan_loss_g_grad(const std::vector<double>& real, const std::vector<double>& fake,
                     std::vector<double>& d_real, std::vector<double>& d_fake);
void gan_loss_d_grad(const std::vector<double>& real, const std::vector<double>& fake,
                     std::vector<double>& d_real, std::vector<double>& d_fake);

double total_g_loss(const LossWeights& w, double l1, double percep, double gan_g);

}  // namespace rsrlab
