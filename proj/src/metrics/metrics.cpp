#include <cmath>
#include <cstdio>
#include <limits>

#include "rsrlab/metrics.hpp"

namespace rsrlab {

double psnr(const Image& a, const Image& b) {
  if (!a.px.same_shape(b.px)) throw DimensionError("psnr shape mismatch");
  // promote to double before differencing: the float SIMD reduction is too
  // coarse for the documented oracle equivalence of this metric
  double acc = 0.0;
  for (int64_t i = 0; i < a.px.size(); ++i) {
    const double d =
        static_cast<double>(a.px.data()[i]) - static_cast<double>(b.px.data()[i]);
    acc += d * d;
  }
  const double mse = acc / static_cast<double>(a.px.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

namespace {

constexpr int kWin = 11;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

const double* gauss11() {
  static double w[kWin];
  static bool ready = false;
  if (!ready) {
    double sum = 0.0;
    for (int i = 0; i < kWin; ++i) {
      const double d = i - (kWin - 1) / 2.0;
      w[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
      sum += w[i];
    }
    for (auto& v : w) v /= sum;
    ready = true;
  }
  return w;
}

// separable valid-mode Gaussian filter of a (h, w) plane into (h-10, w-10)
void gfilter(const std::vector<double>& src, int h, int w, std::vector<double>& tmp,
             std::vector<double>& dst) {
  const double* g = gauss11();
  const int wo = w - kWin + 1, ho = h - kWin + 1;
  tmp.assign(static_cast<size_t>(h) * wo, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < wo; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWin; ++k) acc += g[k] * src[static_cast<size_t>(y) * w + x + k];
      tmp[static_cast<size_t>(y) * wo + x] = acc;
    }
  dst.assign(static_cast<size_t>(ho) * wo, 0.0);
  for (int y = 0; y < ho; ++y)
    for (int x = 0; x < wo; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWin; ++k) acc += g[k] * tmp[static_cast<size_t>(y + k) * wo + x];
      dst[static_cast<size_t>(y) * wo + x] = acc;
    }
}

}  // namespace

double ssim(const Image& a, const Image& b) {
  if (!a.px.same_shape(b.px)) throw DimensionError("ssim shape mismatch");
  const int c = a.channels(), h = a.height(), w = a.width();
  if (h < kWin || w < kWin) throw DimensionError("ssim needs images at least 11x11");

  const size_t plane = static_cast<size_t>(h) * w;
  std::vector<double> pa(plane), pb(plane), paa(plane), pbb(plane), pab(plane);
  std::vector<double> tmp, mua, mub, saa, sbb, sab;
  double total = 0.0;
  for (int ch = 0; ch < c; ++ch) {
    const float* xa = a.px.data() + ch * plane;
    const float* xb = b.px.data() + ch * plane;
    for (size_t i = 0; i < plane; ++i) {
      pa[i] = xa[i];
      pb[i] = xb[i];
      paa[i] = pa[i] * pa[i];
      pbb[i] = pb[i] * pb[i];
      pab[i] = pa[i] * pb[i];
    }
    gfilter(pa, h, w, tmp, mua);
    gfilter(pb, h, w, tmp, mub);
    gfilter(paa, h, w, tmp, saa);
    gfilter(pbb, h, w, tmp, sbb);
    gfilter(pab, h, w, tmp, sab);
    double acc = 0.0;
    for (size_t i = 0; i < mua.size(); ++i) {
      const double ma = mua[i], mb = mub[i];
      const double va = saa[i] - ma * ma;
      const double vb = sbb[i] - mb * mb;
      const double cov = sab[i] - ma * mb;
      acc += ((2.0 * ma * mb + kC1) * (2.0 * cov + kC2)) /
             ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
    }
    total += acc / static_cast<double>(mua.size());
  }
  return total / c;
}

namespace {

// channel-unit-normalize a (c, h, w) map at every spatial location
void unit_normalize(const TensorF& m, std::vector<double>& out) {
  const int c = m.dim(0), h = m.dim(1), w = m.dim(2);
  const int64_t plane = static_cast<int64_t>(h) * w;
  out.resize(static_cast<size_t>(c) * plane);
  for (int64_t i = 0; i < plane; ++i) {
    double norm = 0.0;
    for (int ch = 0; ch < c; ++ch) {
      const double v = m.data()[ch * plane + i];
      norm += v * v;
    }
    norm = std::sqrt(norm) + 1e-10;
    for (int ch = 0; ch < c; ++ch)
      out[static_cast<size_t>(ch) * plane + i] = m.data()[ch * plane + i] / norm;
  }
}

}  // namespace

double perceptual_distance(const FeatureNet<float>& F, const Image& a, const Image& b) {
  if (!a.px.same_shape(b.px)) throw DimensionError("perceptual_distance shape mismatch");
  FeatureNet<float>::Ws wa, wb;
  F.fwd(a.px, wa);
  F.fwd(b.px, wb);
  std::vector<double> na, nb;
  double total = 0.0;
  for (int s = 0; s < FeatureNet<float>::kStages; ++s) {
    unit_normalize(wa.m[s], na);
    unit_normalize(wb.m[s], nb);
    double acc = 0.0;
    for (size_t i = 0; i < na.size(); ++i) {
      const double d = na[i] - nb[i];
      acc += d * d;
    }
    total += acc / static_cast<double>(na.size());
  }
  return total;
}

std::map<std::string, MetricReport::Aggregate> MetricReport::aggregates() const {
  std::map<std::string, Aggregate> agg;
  for (const auto& r : rows) {
    auto& a = agg[r.corruption];
    a.psnr_db += r.psnr_db;
    a.ssim_v += r.ssim_v;
    a.percep += r.percep;
    a.count += 1;
  }
  for (auto& [k, a] : agg) {
    a.psnr_db /= a.count;
    a.ssim_v /= a.count;
    a.percep /= a.count;
  }
  return agg;
}

void MetricReport::write_csv(std::ostream& os) const {
  os << "image_id,corruption,psnr_db,ssim,percep\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.9g,%.9g,%.9g\n", r.image_id.c_str(),
                  r.corruption.c_str(), r.psnr_db, r.ssim_v, r.percep);
    os << buf;
  }
}

MetricReport evaluate(ModelBundle& bundle, const std::vector<PatchPair>& eval_set,
                      const std::vector<CorruptionSpec>& corruptions) {
  if (eval_set.empty()) throw ArgumentError("evaluate: empty eval set");
  MetricReport report;
  Generator<float>::Ws gws;
  char idbuf[16];
  for (size_t i = 0; i < eval_set.size(); ++i) {
    const auto& pair = eval_set[i];
    std::snprintf(idbuf, sizeof(idbuf), "%06zu", i);
    for (int variant = -1; variant < static_cast<int>(corruptions.size()); ++variant) {
      Image lr;
      std::string label;
      if (variant < 0) {
        lr = pair.lr;
        label = "clean";
      } else {
        CorruptionSpec spec = corruptions[variant];
        spec.seed = derive_seed(spec.seed, static_cast<uint64_t>(i));
        lr = degrade(pair.lr, spec);
        label = corruptions[variant].label();
      }
      Image sr(bundle.G.fwd(lr.px, gws));
      kernels::clamp01(sr.px.data(), sr.px.size());
      MetricRow row;
      row.image_id = idbuf;
      row.corruption = label;
      row.psnr_db = psnr(sr, pair.hr);
      row.ssim_v = ssim(sr, pair.hr);
      row.percep = perceptual_distance(bundle.F, sr, pair.hr);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace rsrlab
