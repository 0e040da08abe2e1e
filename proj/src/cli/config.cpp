#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "rsrlab/cli.hpp"

namespace rsrlab {
namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double plain_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("empty numeric value for " + key);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw ConfigError("bad numeric value for " + key + ": " + text);
  return v;
}

int64_t parse_i64(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("empty integer value for " + key);
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size()) throw ConfigError("bad integer value for " + key + ": " + text);
  return static_cast<int64_t>(v);
}

int parse_int(const std::string& key, const std::string& text) {
  return static_cast<int>(parse_i64(key, text));
}

uint64_t parse_u64(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("empty integer value for " + key);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size()) throw ConfigError("bad integer value for " + key + ": " + text);
  return static_cast<uint64_t>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError("bad boolean value for " + key + ": " + text);
}

void set_attack_loss(AttackConfig& a, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "l1") {
    a.use_l1 = true;
    a.use_percep = false;
  } else if (v == "percep") {
    a.use_l1 = false;
    a.use_percep = true;
  } else if (v == "both") {
    a.use_l1 = true;
    a.use_percep = true;
  } else {
    throw ConfigError("bad loss selector for " + key + ": " + value +
                      " (expected l1, percep or both)");
  }
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i];
  }
  return out;
}

}  // namespace

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  const size_t slash = t.find('/');
  if (slash == std::string::npos) return plain_number(key, t);
  const double num = plain_number(key, t.substr(0, slash));
  const double den = plain_number(key, t.substr(slash + 1));
  if (den == 0.0) throw ConfigError("zero denominator for " + key + ": " + text);
  return num / den;
}

void RunConfig::apply(const std::string& key, const std::string& value) {
  // [run]
  if (key == "run.seed") {
    seed = parse_u64(key, value);
  } else if (key == "run.out_dir") {
    out_dir = trim(value);
  } else if (key == "run.checkpoint") {
    checkpoint = trim(value);
    // [data]
  } else if (key == "data.train_dir") {
    data.train_dir = trim(value);
  } else if (key == "data.eval_dir") {
    data.eval_dir = trim(value);
  } else if (key == "data.patch_size") {
    data.patch_size = parse_int(key, value);
  } else if (key == "data.patch_stride") {
    data.patch_stride = parse_int(key, value);
  } else if (key == "data.max_patches") {
    data.max_patches = parse_int(key, value);
  } else if (key == "data.corruptions") {
    data.corruptions = split_list(value);
    // [model]
  } else if (key == "model.num_blocks") {
    model.num_blocks = parse_int(key, value);
  } else if (key == "model.base_channels") {
    model.base_channels = parse_int(key, value);
  } else if (key == "model.growth_channels") {
    model.growth_channels = parse_int(key, value);
  } else if (key == "model.scale") {
    model.scale = parse_int(key, value);
    // [train]
  } else if (key == "train.learning_rate") {
    train.learning_rate = parse_number(key, value);
  } else if (key == "train.beta1") {
    train.beta1 = parse_number(key, value);
  } else if (key == "train.beta2") {
    train.beta2 = parse_number(key, value);
  } else if (key == "train.adam_eps") {
    train.adam_eps = parse_number(key, value);
  } else if (key == "train.batch_size") {
    train.batch_size = parse_int(key, value);
  } else if (key == "train.total_iters") {
    train.total_iters = parse_i64(key, value);
  } else if (key == "train.l1_warmup_iters") {
    train.l1_warmup_iters = parse_i64(key, value);
  } else if (key == "train.adv_fraction") {
    train.adv_fraction = parse_number(key, value);
  } else if (key == "train.checkpoint_every") {
    train.checkpoint_every = parse_i64(key, value);
    // [loss]
  } else if (key == "loss.l1") {
    train.weights.w_l1 = parse_number(key, value);
  } else if (key == "loss.percep") {
    train.weights.w_percep = parse_number(key, value);
  } else if (key == "loss.gan") {
    train.weights.w_gan = parse_number(key, value);
    // [attack]
  } else if (key == "attack.epsilon") {
    train.attack.epsilon = parse_number(key, value);
  } else if (key == "attack.iters") {
    train.attack.iters = parse_int(key, value);
  } else if (key == "attack.alpha") {
    train.attack.alpha = parse_number(key, value);
  } else if (key == "attack.structure_scale") {
    train.attack.structure_scale = parse_number(key, value);
  } else if (key == "attack.loss") {
    set_attack_loss(train.attack, key, value);
  } else if (key == "attack.recenter") {
    train.attack.recenter = parse_bool(key, value);
    // [ablate]
  } else if (key == "ablate.epsilon") {
    ablate.epsilon.clear();
    for (const auto& s : split_list(value)) ablate.epsilon.push_back(parse_number(key, s));
  } else if (key == "ablate.iters") {
    ablate.iters.clear();
    for (const auto& s : split_list(value)) ablate.iters.push_back(parse_int(key, s));
  } else if (key == "ablate.structure") {
    ablate.structure.clear();
    for (const auto& s : split_list(value)) ablate.structure.push_back(parse_number(key, s));
  } else if (key == "ablate.loss") {
    ablate.loss = split_list(value);
    for (const auto& s : ablate.loss) {
      AttackConfig probe;  // reuse the selector validation
      set_attack_loss(probe, key, s);
    }
  } else if (key == "ablate.robust_iters") {
    ablate.robust_iters = parse_i64(key, value);
    // [corpus]
  } else if (key == "corpus.train_count") {
    corpus.train_count = parse_int(key, value);
  } else if (key == "corpus.eval_count") {
    corpus.eval_count = parse_int(key, value);
  } else if (key == "corpus.size") {
    corpus.size = parse_int(key, value);
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

void RunConfig::resolve() {
  model.seed = seed;
  train.seed = seed;
  train.attack.seed = derive_seed(seed, 0x6e6f697365ull, 0);  // attack noise stream
  corruption_specs.clear();
  for (size_t i = 0; i < data.corruptions.size(); ++i)
    corruption_specs.push_back(
        CorruptionSpec::parse(data.corruptions[i], derive_seed(seed, 0x636f7272ull, i)));
  if (data.patch_size < 8) throw ConfigError("data.patch_size must be at least 8");
  if (data.patch_stride < 1) throw ConfigError("data.patch_stride must be at least 1");
  if (data.max_patches < 0) throw ConfigError("data.max_patches must be non-negative");
  if (corpus.train_count < 1 || corpus.eval_count < 1)
    throw ConfigError("corpus counts must be positive");
  if (corpus.size < 32 || corpus.size % 4 != 0)
    throw ConfigError("corpus.size must be a multiple of 4, at least 32");
  if (ablate.robust_iters < 1) throw ConfigError("ablate.robust_iters must be positive");
  if (ablate.epsilon.empty() && ablate.iters.empty() && ablate.structure.empty() &&
      ablate.loss.empty())
    throw ConfigError("ablate sweep lists are all empty");
  model.validate();
  train.validate();
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  os << "# resolved configuration; re-running from this file reproduces the run\n";
  os << "[run]\n";
  os << "seed = " << seed << "\n";
  os << "out_dir = " << out_dir << "\n";
  os << "checkpoint = " << checkpoint << "\n";
  os << "\n[data]\n";
  os << "train_dir = " << data.train_dir << "\n";
  os << "eval_dir = " << data.eval_dir << "\n";
  os << "patch_size = " << data.patch_size << "\n";
  os << "patch_stride = " << data.patch_stride << "\n";
  os << "max_patches = " << data.max_patches << "\n";
  os << "corruptions = " << join(data.corruptions) << "\n";
  os << "\n[model]\n";
  os << "num_blocks = " << model.num_blocks << "\n";
  os << "base_channels = " << model.base_channels << "\n";
  os << "growth_channels = " << model.growth_channels << "\n";
  os << "scale = " << model.scale << "\n";
  os << "\n[train]\n";
  os << "learning_rate = " << g17(train.learning_rate) << "\n";
  os << "beta1 = " << g17(train.beta1) << "\n";
  os << "beta2 = " << g17(train.beta2) << "\n";
  os << "adam_eps = " << g17(train.adam_eps) << "\n";
  os << "batch_size = " << train.batch_size << "\n";
  os << "total_iters = " << train.total_iters << "\n";
  os << "l1_warmup_iters = " << train.l1_warmup_iters << "\n";
  os << "adv_fraction = " << g17(train.adv_fraction) << "\n";
  os << "checkpoint_every = " << train.checkpoint_every << "\n";
  os << "\n[loss]\n";
  os << "l1 = " << g17(train.weights.w_l1) << "\n";
  os << "percep = " << g17(train.weights.w_percep) << "\n";
  os << "gan = " << g17(train.weights.w_gan) << "\n";
  os << "\n[attack]\n";
  os << "epsilon = " << g17(train.attack.epsilon) << "\n";
  os << "iters = " << train.attack.iters << "\n";
  os << "alpha = " << g17(train.attack.alpha) << "\n";
  os << "structure_scale = " << g17(train.attack.structure_scale) << "\n";
  os << "loss = "
     << (train.attack.use_l1 ? (train.attack.use_percep ? "both" : "l1") : "percep") << "\n";
  os << "recenter = " << (train.attack.recenter ? "true" : "false") << "\n";
  os << "\n[ablate]\n";
  os << "epsilon = ";
  for (size_t i = 0; i < ablate.epsilon.size(); ++i)
    os << (i ? "," : "") << g17(ablate.epsilon[i]);
  os << "\n";
  os << "iters = ";
  for (size_t i = 0; i < ablate.iters.size(); ++i) os << (i ? "," : "") << ablate.iters[i];
  os << "\n";
  os << "structure = ";
  for (size_t i = 0; i < ablate.structure.size(); ++i)
    os << (i ? "," : "") << g17(ablate.structure[i]);
  os << "\n";
  os << "loss = " << join(ablate.loss) << "\n";
  os << "robust_iters = " << ablate.robust_iters << "\n";
  os << "\n[corpus]\n";
  os << "train_count = " << corpus.train_count << "\n";
  os << "eval_count = " << corpus.eval_count << "\n";
  os << "size = " << corpus.size << "\n";
  return os.str();
}

namespace {

// every key, in echo order; bare keys (no [section]) resolve to the first
// entry whose name matches, so `epsilon = 14/255` means attack.epsilon
const std::vector<std::string> kKeys = {
    "run.seed",           "run.out_dir",          "run.checkpoint",
    "data.train_dir",     "data.eval_dir",        "data.patch_size",
    "data.patch_stride",  "data.max_patches",     "data.corruptions",
    "model.num_blocks",   "model.base_channels",  "model.growth_channels",
    "model.scale",        "train.learning_rate",  "train.beta1",
    "train.beta2",        "train.adam_eps",       "train.batch_size",
    "train.total_iters",  "train.l1_warmup_iters", "train.adv_fraction",
    "train.checkpoint_every", "loss.l1",          "loss.percep",
    "loss.gan",           "attack.epsilon",       "attack.iters",
    "attack.alpha",       "attack.structure_scale", "attack.loss",
    "attack.recenter",    "ablate.epsilon",       "ablate.iters",
    "ablate.structure",   "ablate.loss",          "ablate.robust_iters",
    "corpus.train_count", "corpus.eval_count",    "corpus.size"};

std::string resolve_bare_key(const std::string& key) {
  for (const auto& full : kKeys)
    if (full.size() > key.size() && full[full.size() - key.size() - 1] == '.' &&
        full.compare(full.size() - key.size(), key.size(), key) == 0)
      return full;
  throw ConfigError("unknown config key: " + key);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  static const std::vector<std::string> kSections = {"run",    "data",   "model", "train",
                                                     "loss",   "attack", "ablate", "corpus"};
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("config line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& s : kSections) known = known || s == section;
      if (!known)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unknown section [" + section + "]");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ParseError("config line " + std::to_string(lineno) + ": empty key");
    try {
      cfg.apply(section.empty() ? resolve_bare_key(key) : section + "." + key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

}  // namespace rsrlab
