#include <cmath>

#include "rsrlab/losses.hpp"

namespace rsrlab {

void LossWeights::validate() const {
  if (!(w_l1 >= 0.0) || !(w_percep >= 0.0) || !(w_gan >= 0.0) || !std::isfinite(w_l1) ||
      !std::isfinite(w_percep) || !std::isfinite(w_gan))
    throw ConfigError("loss weights must be finite and nonnegative");
}

namespace {

// log sigma(z), stable for large |z|
double logsig(double z) { return std::min(z, 0.0) - std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void check_nonempty(const std::vector<double>& real, const std::vector<double>& fake) {
  if (real.empty() || fake.empty()) throw ArgumentError("gan loss needs nonempty logit lists");
}

}  // namespace

// L_G = -mean_i log(1 - sigma(r_i - mean_f)) - mean_j log sigma(f_j - mean_r)
double gan_loss_g(const std::vector<double>& real, const std::vector<double>& fake) {
  check_nonempty(real, fake);
  const double mr = mean(real), mf = mean(fake);
  double loss = 0.0;
  for (const double r : real) loss -= logsig(-(r - mf)) / static_cast<double>(real.size());
  for (const double f : fake) loss -= logsig(f - mr) / static_cast<double>(fake.size());
  return loss;
}

// mirror of gan_loss_g with roles swapped
double gan_loss_d(const std::vector<double>& real, const std::vector<double>& fake) {
  check_nonempty(real, fake);
  const double mr = mean(real), mf = mean(fake);
  double loss = 0.0;
  for (const double r : real) loss -= logsig(r - mf) / static_cast<double>(real.size());
  for (const double f : fake) loss -= logsig(-(f - mr)) / static_cast<double>(fake.size());
  return loss;
}

void gan_loss_g_grad(const std::vector<double>& real, const std::vector<double>& fake,
                     std::vector<double>& d_real, std::vector<double>& d_fake) {
  check_nonempty(real, fake);
  const size_t m = real.size(), n = fake.size();
  const double mr = mean(real), mf = mean(fake);
  double sum_sr = 0.0;  // sum_i sigma(r_i - mean_f)
  for (const double r : real) sum_sr += sigmoid(r - mf);
  double sum_sf = 0.0;  // sum_j sigma(mean_r - f_j)
  for (const double f : fake) sum_sf += sigmoid(mr - f);

  d_real.resize(m);
  d_fake.resize(n);
  for (size_t i = 0; i < m; ++i)
    d_real[i] = sigmoid(real[i] - mf) / m + sum_sf / (m * n);
  for (size_t j = 0; j < n; ++j)
    d_fake[j] = -sigmoid(mr - fake[j]) / n - sum_sr / (m * n);
}

void gan_loss_d_grad(const std::vector<double>& real, const std::vector<double>& fake,
                     std::vector<double>& d_real, std::vector<double>& d_fake) {
  check_nonempty(real, fake);
  const size_t m = real.size(), n = fake.size();
  const double mr = mean(real), mf = mean(fake);
  double sum_sr = 0.0;  // sum_i sigma(mean_f - r_i)
  for (const double r : real) sum_sr += sigmoid(mf - r);
  double sum_sf = 0.0;  // sum_j sigma(f_j - mean_r)
  for (const double f : fake) sum_sf += sigmoid(f - mr);

  d_real.resize(m);
  d_fake.resize(n);
  for (size_t i = 0; i < m; ++i)
    d_real[i] = -sigmoid(mf - real[i]) / m - sum_sf / (m * n);
  for (size_t j = 0; j < n; ++j)
    d_fake[j] = sigmoid(fake[j] - mr) / n + sum_sr / (m * n);
}

double total_g_loss(const LossWeights& w, double l1, double percep, double gan_g) {
  if (!std::isfinite(l1) || !std::isfinite(percep) || !std::isfinite(gan_g))
    throw NumericalError("total_g_loss: non-finite component");
  return w.w_l1 * l1 + w.w_percep * percep + w.w_gan * gan_g;
}

}  // namespace rsrlab
