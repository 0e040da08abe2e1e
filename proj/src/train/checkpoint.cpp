#include <cstdint>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "rsrlab/train.hpp"

namespace rsrlab {
namespace {

constexpr const char* kMagic = "rsrlab-ckpt-v1";

struct Entry {
  std::string name;
  std::vector<int> shape;
  TensorF* tensor;
};

// flat tensor directory in a fixed order: network parameters (visit order),
// then Adam first/second moments keyed by the parameter they belong to
std::vector<Entry> directory(TrainState& st) {
  std::vector<Entry> out;
  auto add_params = [&](auto& net) {
    net.visit([&](const std::string& name, TensorF& w, TensorF&) {
      std::vector<int> shape;
      for (int d = 0; d < w.ndim(); ++d) shape.push_back(w.dim(d));
      out.push_back({name, shape, &w});
    });
  };
  add_params(st.bundle.G);
  add_params(st.bundle.D);
  add_params(st.bundle.F);
  auto add_moments = [&](auto& net, AdamState& opt) {
    size_t k = 0;
    net.visit([&](const std::string& name, TensorF& w, TensorF&) {
      std::vector<int> shape{static_cast<int>(w.size())};
      out.push_back({name + ".adam_m", shape, &opt.m[k]});
      out.push_back({name + ".adam_v", shape, &opt.v[k]});
      ++k;
    });
  };
  add_moments(st.bundle.G, st.g_opt);
  add_moments(st.bundle.D, st.d_opt);
  return out;
}

void write_u64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

uint64_t read_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw FormatError("checkpoint truncated in header length");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void save_checkpoint(TrainState& st, const std::string& path) {
  auto dir = directory(st);

  nlohmann::json hdr;
  hdr["format"] = kMagic;
  hdr["generator"] = {{"num_blocks", st.bundle.gcfg.num_blocks},
                      {"base_channels", st.bundle.gcfg.base_channels},
                      {"growth_channels", st.bundle.gcfg.growth_channels},
                      {"scale", st.bundle.gcfg.scale},
                      {"seed", st.bundle.gcfg.seed}};
  hdr["model_seed"] = st.bundle.seed;
  hdr["iter"] = st.iter;
  hdr["rng"] = st.rng.state();
  hdr["g_opt_t"] = st.g_opt.t;
  hdr["d_opt_t"] = st.d_opt.t;
  hdr["avg"] = {{"l1", st.avg.l1},
                {"percep", st.avg.percep},
                {"gan_g", st.avg.gan_g},
                {"gan_d", st.avg.gan_d},
                {"attack", st.avg.attack}};

  uint64_t offset = 0;
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& e : dir) {
    nlohmann::json t;
    t["name"] = e.name;
    t["shape"] = e.shape;
    t["offset"] = offset;
    t["count"] = e.tensor->size();
    tensors.push_back(t);
    offset += static_cast<uint64_t>(e.tensor->size());
  }
  hdr["tensors"] = tensors;

  // nlohmann::json keeps object keys sorted, so the serialized header (and
  // with it the whole file) is a deterministic function of the state
  const std::string header = hdr.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open checkpoint for writing: " + path);
  os << kMagic << '\n';
  write_u64(os, header.size());
  os.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (const auto& e : dir)
    os.write(reinterpret_cast<const char*>(e.tensor->data()),
             static_cast<std::streamsize>(sizeof(float) * e.tensor->size()));
  os.flush();
  if (!os) throw IoError("failed writing checkpoint: " + path);
}

TrainState load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint: " + path);

  std::string magic;
  if (!std::getline(is, magic)) throw FormatError("checkpoint truncated before magic");
  if (magic != kMagic) throw FormatError("unsupported checkpoint format tag: " + magic);

  const uint64_t hlen = read_u64(is);
  std::string header(hlen, '\0');
  is.read(header.data(), static_cast<std::streamsize>(hlen));
  if (!is) throw FormatError("checkpoint truncated in header");

  nlohmann::json hdr;
  try {
    hdr = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad checkpoint header: ") + e.what());
  }
  if (hdr.value("format", "") != kMagic)
    throw FormatError("checkpoint header format mismatch");

  GeneratorConfig gcfg;
  const auto& g = hdr.at("generator");
  gcfg.num_blocks = g.at("num_blocks").get<int>();
  gcfg.base_channels = g.at("base_channels").get<int>();
  gcfg.growth_channels = g.at("growth_channels").get<int>();
  gcfg.scale = g.at("scale").get<int>();
  gcfg.seed = g.at("seed").get<uint64_t>();

  TrainState st = make_train_state(gcfg, hdr.at("model_seed").get<uint64_t>());
  st.iter = hdr.at("iter").get<int64_t>();
  st.rng.set_state(hdr.at("rng").get<std::string>());
  st.g_opt.t = hdr.at("g_opt_t").get<int64_t>();
  st.d_opt.t = hdr.at("d_opt_t").get<int64_t>();
  const auto& avg = hdr.at("avg");
  st.avg.l1 = avg.at("l1").get<double>();
  st.avg.percep = avg.at("percep").get<double>();
  st.avg.gan_g = avg.at("gan_g").get<double>();
  st.avg.gan_d = avg.at("gan_d").get<double>();
  st.avg.attack = avg.at("attack").get<double>();

  auto dir = directory(st);
  const auto& tensors = hdr.at("tensors");
  if (tensors.size() != dir.size())
    throw FormatError("checkpoint tensor directory size mismatch");
  for (size_t i = 0; i < dir.size(); ++i) {
    const auto& t = tensors.at(i);
    if (t.at("name").get<std::string>() != dir[i].name)
      throw FormatError("checkpoint tensor order mismatch at " + dir[i].name);
    if (t.at("count").get<int64_t>() != dir[i].tensor->size())
      throw FormatError("checkpoint tensor size mismatch at " + dir[i].name);
    is.read(reinterpret_cast<char*>(dir[i].tensor->data()),
            static_cast<std::streamsize>(sizeof(float) * dir[i].tensor->size()));
    if (!is) throw FormatError("checkpoint truncated in tensor " + dir[i].name);
  }
  return st;
}

}  // namespace rsrlab
