#pragma once

#include <functional>

#include "rsrlab/image.hpp"
#include "rsrlab/model.hpp"

namespace rsrlab {

// PGD recipe. alpha < 0 means "use epsilon/2".
struct AttackConfig {
  double epsilon = 14.0 / 255.0;
  int iters = 2;
  double alpha = -1.0;
  double structure_scale = 1.5;
  bool use_l1 = true;
  bool use_percep = true;
  bool recenter = false;  // re-center the ball on the running iterate (study flag)
  uint64_t seed = 0;

  double step() const { return alpha < 0.0 ? epsilon * 0.5 : alpha; }
  void validate() const;
};

// uniform[-eps, eps] noise drawn on a ceil(h/scale) x ceil(w/scale) grid per
// channel and replicated nearest-neighbor to (c, h, w)
TensorF init_structured_noise(int h, int w, int c, const AttackConfig& cfg);

// in-place clamp of x to the eps-ball around x0 intersected with [0,1]
void project(TensorF& x, const TensorF& x0, double eps);

// the maximized objective: enabled loss terms of G(x) against hr, with G and
// F treated as constants
double attack_loss(ModelBundle& bundle, const TensorF& x, const TensorF& hr,
                   const AttackConfig& cfg);

// loss callback for the PGD core: returns the objective at x and, when grad
// is non-null, writes d(objective)/dx into it
using AttackLossFn = std::function<double(const TensorF& x, TensorF* grad)>;

// signed-gradient ascent with projection; exposed separately so tests can
// drive it with analytic stub objectives
TensorF pgd_core(const TensorF& lr, const AttackConfig& cfg, const AttackLossFn& fn);

// full attack against the bundle's generator; output satisfies
// |adv - lr|_inf <= eps and adv in [0,1] exactly
Image pgd_attack(ModelBundle& bundle, const Image& lr, const Image& hr, const AttackConfig& cfg);

}  // namespace rsrlab
