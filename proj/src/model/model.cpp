#include "rsrlab/model.hpp"

namespace rsrlab {

void GeneratorConfig::validate() const {
  if (num_blocks < 1 || base_channels < 1 || growth_channels < 1)
    throw ConfigError("generator block/channel counts must be positive");
  if (scale != 2 && scale != 4) throw ConfigError("generator scale must be 2 or 4");
}

namespace {

// every trainable parameter must see a nonzero gradient from one random batch
template <typename Net, typename Fwd>
void check_live_gradients(Net& net, const char* what, Fwd&& run_fwd_bwd) {
  net.zero_grad();
  run_fwd_bwd();
  net.visit([&](const std::string& name, TensorF&, TensorF& g) {
    for (int64_t i = 0; i < g.size(); ++i)
      if (g.data()[i] != 0.f) return;
    throw NumericalError(std::string(what) + " parameter " + name +
                         " received no gradient at init");
  });
  net.zero_grad();
}

}  // namespace

ModelBundle init_models(const GeneratorConfig& gcfg, uint64_t seed) {
  gcfg.validate();
  ModelBundle b;
  b.gcfg = gcfg;
  b.seed = seed;
  b.G.init(gcfg, derive_seed(seed, 1));
  b.D.init(8, derive_seed(seed, 2));
  b.F.init(derive_seed(seed, 3));

  Rng probe(derive_seed(seed, 4));
  TensorF lr({3, 8, 8});
  for (int64_t i = 0; i < lr.size(); ++i) lr.data()[i] = static_cast<float>(probe.uniform());

  Generator<float>::Ws gws;
  check_live_gradients(b.G, "generator", [&] {
    const auto& sr = b.G.fwd(lr, gws);
    TensorF dout;
    dout.reshape({sr.dim(0), sr.dim(1), sr.dim(2)});
    for (int64_t i = 0; i < dout.size(); ++i)
      dout.data()[i] = static_cast<float>(probe.uniform(-1.0, 1.0));
    b.G.bwd(gws, dout, nullptr, true);
  });

  TensorF hr({3, 16, 16});
  for (int64_t i = 0; i < hr.size(); ++i) hr.data()[i] = static_cast<float>(probe.uniform());
  Discriminator<float>::Ws dws;
  check_live_gradients(b.D, "discriminator", [&] {
    b.D.fwd(hr, dws);
    b.D.bwd(dws, 1.f, nullptr, true);
  });

  return b;
}

uint64_t bundle_checksum(ModelBundle& b) {
  const uint64_t g = param_checksum(b.G);
  const uint64_t d = param_checksum(b.D);
  const uint64_t f = param_checksum(b.F);
  return mix64(g ^ mix64(d ^ mix64(f)));
}

}  // namespace rsrlab
