#include <cmath>

#include "rsrlab/dataio.hpp"
#include "rsrlab/rng.hpp"

namespace rsrlab {

void CorruptionSpec::validate() const {
  switch (kind) {
    case Kind::gaussian:
      if (strength < 0.0 || strength > 1.0) throw ConfigError("gaussian sigma must be in [0,1]");
      break;
    case Kind::salt_pepper:
      if (strength < 0.0 || strength > 1.0)
        throw ConfigError("salt_pepper probability must be in [0,1]");
      break;
    case Kind::quantize:
      if (strength < 2.0) throw ConfigError("quantize needs at least 2 levels");
      break;
  }
}

std::string CorruptionSpec::label() const {
  const char* name = kind == Kind::gaussian    ? "gaussian"
                     : kind == Kind::salt_pepper ? "salt_pepper"
                                                 : "quantize";
  char buf[64];
  if (kind == Kind::quantize)
    std::snprintf(buf, sizeof(buf), "%s:%d", name, static_cast<int>(strength));
  else
    std::snprintf(buf, sizeof(buf), "%s:%g", name, strength);
  return buf;
}

CorruptionSpec CorruptionSpec::parse(const std::string& text, uint64_t seed) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ConfigError("corruption must look like kind:strength, got '" + text + "'");
  const std::string name = text.substr(0, colon);
  CorruptionSpec spec;
  if (name == "gaussian")
    spec.kind = Kind::gaussian;
  else if (name == "salt_pepper")
    spec.kind = Kind::salt_pepper;
  else if (name == "quantize")
    spec.kind = Kind::quantize;
  else
    throw ConfigError("unknown corruption kind '" + name + "'");
  try {
    spec.strength = std::stod(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("bad corruption strength in '" + text + "'");
  }
  spec.seed = seed;
  spec.validate();
  return spec;
}

Image degrade(const Image& img, const CorruptionSpec& spec) {
  spec.validate();
  Image out = img;
  Rng rng(spec.seed);
  float* p = out.px.data();
  const int64_t n = out.px.size();
  switch (spec.kind) {
    case CorruptionSpec::Kind::gaussian: {
      const double sigma = spec.strength;
      for (int64_t i = 0; i < n; ++i) {
        const double v = p[i] + sigma * rng.normal();
        p[i] = static_cast<float>(v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v));
      }
      break;
    }
    case CorruptionSpec::Kind::salt_pepper: {
      const double prob = spec.strength;
      for (int64_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        if (u < prob * 0.5)
          p[i] = 0.f;
        else if (u < prob)
          p[i] = 1.f;
      }
      break;
    }
    case CorruptionSpec::Kind::quantize: {
      const double steps = spec.strength - 1.0;
      for (int64_t i = 0; i < n; ++i)
        p[i] = static_cast<float>(std::round(p[i] * steps) / steps);
      break;
    }
  }
  return out;
}

}  // namespace rsrlab
