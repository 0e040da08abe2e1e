#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "rsrlab/dataio.hpp"
#include "rsrlab/model.hpp"

namespace rsrlab {

// 10*log10(1/MSE), peak 1; +infinity for identical images
double psnr(const Image& a, const Image& b);

// single-scale SSIM: 11x11 Gaussian window sigma=1.5, K1=0.01, K2=0.03,
// dynamic range 1, valid-window mean, averaged over channels
double ssim(const Image& a, const Image& b);

// sum over feature stages of the mean squared difference between
// channel-unit-normalized feature maps (LPIPS-shaped surrogate)
double perceptual_distance(const FeatureNet<float>& F, const Image& a, const Image& b);

struct MetricRow {
  std::string image_id;
  std::string corruption;  // "clean" or CorruptionSpec::label()
  double psnr_db = 0.0;
  double ssim_v = 0.0;
  double percep = 0.0;
};

struct MetricReport {
  std::vector<MetricRow> rows;

  struct Aggregate {
    double psnr_db = 0.0, ssim_v = 0.0, percep = 0.0;
    int count = 0;
  };
  // per-corruption means, keyed by corruption label
  std::map<std::string, Aggregate> aggregates() const;
  void write_csv(std::ostream& os) const;
};

// run the generator on the clean LR and each corrupted variant, clamp, score
// against the HR. Corruption noise is re-seeded per image from spec.seed.
MetricReport evaluate(ModelBundle& bundle, const std::vector<PatchPair>& eval_set,
                      const std::vector<CorruptionSpec>& corruptions);

}  // namespace rsrlab
