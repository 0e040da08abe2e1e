#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "rsrlab/cli.hpp"
#include "rsrlab/metrics.hpp"

namespace fs = std::filesystem;

namespace rsrlab {
namespace {

std::string g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string zero_pad(int64_t v, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*lld", width, static_cast<long long>(v));
  return buf;
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory " + path + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << text;
  os.flush();
  if (!os) throw IoError("cannot write " + path);
}

std::vector<std::string> list_pngs(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".png") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw IoError("no .png files in " + dir);
  return out;
}

// crop top-left so both dims are multiples of s and large enough for the
// generator (LR side at least 8)
Image trim_to_multiple(const Image& img, int s) {
  const int h = img.height() / s * s, w = img.width() / s * s;
  if (h < 8 * s || w < 8 * s)
    throw DimensionError("image too small for scale " + std::to_string(s));
  if (h == img.height() && w == img.width()) return img;
  Image out(img.channels(), h, w);
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(c, y, x) = img.at(c, y, x);
  return out;
}

Image to_rgb(Image img) {
  if (img.channels() == 3) return img;
  Image out(3, img.height(), img.width());
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) out.at(c, y, x) = img.at(0, y, x);
  return out;
}

// whole-image pairs for evaluation / attack export
std::vector<PatchPair> load_eval_pairs(const RunConfig& cfg) {
  std::vector<PatchPair> pairs;
  for (const auto& path : list_pngs(cfg.data.eval_dir))
    pairs.push_back(make_pair(trim_to_multiple(to_rgb(load_image(path)), cfg.model.scale),
                              cfg.model.scale));
  return pairs;
}

// training patches: crop HR grids, downsample each crop
std::vector<PatchPair> load_train_pairs(const RunConfig& cfg) {
  const int s = cfg.model.scale;
  std::vector<PatchPair> pairs;
  for (const auto& path : list_pngs(cfg.data.train_dir)) {
    const Image hr = trim_to_multiple(to_rgb(load_image(path)), s);
    for (auto& patch :
         crop_patches(hr, cfg.data.patch_size * s, cfg.data.patch_stride * s, cfg.seed))
      pairs.push_back(make_pair(patch, s));
  }
  if (cfg.data.max_patches > 0 && static_cast<int>(pairs.size()) > cfg.data.max_patches) {
    std::vector<size_t> idx(pairs.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng(derive_seed(cfg.seed, 0x737562ull, 0));  // patch subset stream
    rng.shuffle(idx);
    idx.resize(static_cast<size_t>(cfg.data.max_patches));
    std::sort(idx.begin(), idx.end());
    std::vector<PatchPair> kept;
    kept.reserve(idx.size());
    for (size_t i : idx) kept.push_back(std::move(pairs[i]));
    pairs = std::move(kept);
  }
  return pairs;
}

std::string sanitize(const std::string& label) {
  std::string out = label;
  for (auto& ch : out)
    if (ch == ':' || ch == ',') ch = '_';
  return out;
}

std::string loss_name(const AttackConfig& a) {
  return a.use_l1 ? (a.use_percep ? "both" : "l1") : "percep";
}

// ------------------------------------------------------------- training CSV

class TrainCsv {
 public:
  TrainCsv(const std::string& path, bool append) {
    const bool header = !append || !fs::exists(path);
    os_.open(path, append ? std::ios::app : std::ios::trunc);
    if (!os_) throw IoError("cannot open training log " + path);
    if (header) os_ << "iter,l1,percep,gan_g,gan_d,attack_loss_mean,wall_time\n";
  }

  void row(int64_t iter, double l1, double percep, double gg, double gd, double atk,
           double wall) {
    os_ << iter << ',' << g9(l1) << ',' << g9(percep) << ',' << g9(gg) << ',' << g9(gd) << ','
        << g9(atk) << ',' << g9(wall) << '\n';
    os_.flush();
  }

 private:
  std::ofstream os_;
};

TrainHooks make_hooks(TrainCsv& csv, const std::string& ckpt_path) {
  TrainHooks hooks;
  hooks.log = [&csv](int64_t it, double l1, double percep, double gg, double gd, double atk,
                     double wall) { csv.row(it, l1, percep, gg, gd, atk, wall); };
  hooks.checkpoint = [ckpt_path](TrainState& st) { save_checkpoint(st, ckpt_path); };
  return hooks;
}

TrainState initial_state(const RunConfig& cfg) {
  if (!cfg.checkpoint.empty()) return load_checkpoint(cfg.checkpoint);
  return make_train_state(cfg.model, cfg.seed);
}

// --------------------------------------------------------- corpus synthesis

// procedural RGB test image: low-frequency sinusoidal field shared across
// channels, a handful of soft-edged shapes, one high-frequency stripe band
Image synth_image(int size, uint64_t seed) {
  Rng rng(seed);
  Image img(3, size, size);
  const int kWaves = 3;
  double fx[kWaves], fy[kWaves], ph[kWaves], amp[kWaves], tint[3][kWaves];
  for (int k = 0; k < kWaves; ++k) {
    fx[k] = rng.uniform(0.5, 3.5) / size;
    fy[k] = rng.uniform(0.5, 3.5) / size;
    ph[k] = rng.uniform(0.0, 6.283185307179586);
    amp[k] = rng.uniform(0.05, 0.18);
    for (int c = 0; c < 3; ++c) tint[c][k] = rng.uniform(0.55, 1.0);
  }
  double base[3];
  for (int c = 0; c < 3; ++c) base[c] = rng.uniform(0.3, 0.7);
  const double sf = rng.uniform(10.0, 22.0) / size;  // stripe frequency
  const double sa = rng.uniform(0.03, 0.08);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      double wave[kWaves];
      for (int k = 0; k < kWaves; ++k)
        wave[k] = std::sin(6.283185307179586 * (fx[k] * x + fy[k] * y) + ph[k]);
      const double stripe = sa * std::sin(6.283185307179586 * sf * (x + 0.37 * y));
      for (int c = 0; c < 3; ++c) {
        double v = base[c] + stripe;
        for (int k = 0; k < kWaves; ++k) v += amp[k] * tint[c][k] * wave[k];
        img.at(c, y, x) = static_cast<float>(v);
      }
    }
  const int nshapes = 3 + static_cast<int>(rng.below(4));
  for (int s = 0; s < nshapes; ++s) {
    const bool disk = rng.uniform() < 0.5;
    const double cx = rng.uniform(0.1, 0.9) * size, cy = rng.uniform(0.1, 0.9) * size;
    const double r = rng.uniform(0.06, 0.22) * size;
    const double feather = rng.uniform(1.0, 4.0);
    double color[3];
    for (int c = 0; c < 3; ++c) color[c] = rng.uniform(0.05, 0.95);
    const double mixw = rng.uniform(0.5, 0.85);
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        double inside;
        if (disk) {
          const double d = std::sqrt((x - cx) * (x - cx) + (y - cy) * (y - cy));
          inside = (r - d) / feather;
        } else {
          const double dx = r - std::abs(x - cx), dy = r * 0.7 - std::abs(y - cy);
          inside = std::min(dx, dy) / feather;
        }
        const double w = std::clamp(inside, 0.0, 1.0) * mixw;
        if (w > 0.0)
          for (int c = 0; c < 3; ++c)
            img.at(c, y, x) = static_cast<float>((1.0 - w) * img.at(c, y, x) + w * color[c]);
      }
  }
  for (int64_t i = 0; i < img.px.size(); ++i)
    img.px.data()[i] = std::clamp(img.px.data()[i], 0.0f, 1.0f);
  return img;
}

// ------------------------------------------------------------------ commands

void cmd_gen_corpus(const RunConfig& cfg, std::ostream& out) {
  ensure_dir(cfg.out_dir + "/train");
  ensure_dir(cfg.out_dir + "/eval");
  for (int i = 0; i < cfg.corpus.train_count; ++i)
    save_image(synth_image(cfg.corpus.size, derive_seed(cfg.seed, 0x747261696eull, i)),
               cfg.out_dir + "/train/img-" + zero_pad(i, 3) + ".png");
  for (int i = 0; i < cfg.corpus.eval_count; ++i)
    save_image(synth_image(cfg.corpus.size, derive_seed(cfg.seed, 0x6576616cull, i)),
               cfg.out_dir + "/eval/img-" + zero_pad(i, 3) + ".png");
  out << "corpus: " << cfg.corpus.train_count << " train + " << cfg.corpus.eval_count
      << " eval images of " << cfg.corpus.size << "x" << cfg.corpus.size << " under "
      << cfg.out_dir << "\n";
}

void cmd_pretrain(const RunConfig& cfg, std::ostream& out) {
  auto pairs = load_train_pairs(cfg);
  TrainState st = initial_state(cfg);
  const std::string ckpt = cfg.out_dir + "/checkpoint-pretrain.rsr";
  TrainCsv csv(cfg.out_dir + "/train-pretrain.csv", st.iter > 0);
  TrainHooks hooks = make_hooks(csv, ckpt);
  pretrain_clean(st, pairs, cfg.train, hooks);
  save_checkpoint(st, ckpt);
  out << "pretrain: " << pairs.size() << " patches, iter " << st.iter << ", checkpoint " << ckpt
      << "\n";
  out << "generator checksum " << param_checksum(st.bundle.G) << "\n";
}

void cmd_robust_train(const RunConfig& cfg, std::ostream& out) {
  auto pairs = load_train_pairs(cfg);
  TrainState st = initial_state(cfg);
  const std::string ckpt = cfg.out_dir + "/checkpoint-robust.rsr";
  TrainCsv csv(cfg.out_dir + "/train-robust.csv", false);
  TrainHooks hooks = make_hooks(csv, ckpt);
  robust_train(st, pairs, cfg.train, hooks);
  save_checkpoint(st, ckpt);
  out << "robust-train: " << pairs.size() << " patches, iter " << st.iter << ", checkpoint "
      << ckpt << "\n";
  out << "generator checksum " << param_checksum(st.bundle.G) << "\n";
}

void cmd_eval(const RunConfig& cfg, std::ostream& out) {
  if (cfg.checkpoint.empty()) throw ConfigError("eval requires run.checkpoint");
  TrainState st = load_checkpoint(cfg.checkpoint);
  auto pairs = load_eval_pairs(cfg);
  MetricReport report = evaluate(st.bundle, pairs, cfg.corruption_specs);
  const std::string path = cfg.out_dir + "/metrics.csv";
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path);
  report.write_csv(os);
  os.flush();
  if (!os) throw IoError("failed writing " + path);
  out << "eval: " << report.rows.size() << " rows -> " << path << "\n";
  for (const auto& [label, agg] : report.aggregates())
    out << "  " << label << ": psnr " << g9(agg.psnr_db) << " dB, ssim " << g9(agg.ssim_v)
        << ", percep " << g9(agg.percep) << " (n=" << agg.count << ")\n";
}

void cmd_attack(const RunConfig& cfg, std::ostream& out) {
  if (cfg.checkpoint.empty()) throw ConfigError("attack requires run.checkpoint");
  TrainState st = load_checkpoint(cfg.checkpoint);
  auto pairs = load_eval_pairs(cfg);
  for (size_t i = 0; i < pairs.size(); ++i) {
    AttackConfig acfg = cfg.train.attack;
    acfg.seed = derive_seed(cfg.train.attack.seed, 0x61746bull, i);
    Image adv = pgd_attack(st.bundle, pairs[i].lr, pairs[i].hr, acfg);
    const double loss = attack_loss(st.bundle, adv.px, pairs[i].hr.px, acfg);
    const std::string stem = cfg.out_dir + "/adv-" + zero_pad(static_cast<int64_t>(i), 3);
    save_image(adv, stem + ".png");
    std::ostringstream sidecar;
    sidecar << "epsilon = " << g9(acfg.epsilon) << "\n"
            << "iters = " << acfg.iters << "\n"
            << "alpha = " << g9(acfg.step()) << "\n"
            << "loss = " << loss_name(acfg) << "\n"
            << "achieved_loss = " << g9(loss) << "\n";
    write_text(stem + ".txt", sidecar.str());
    out << "attack: " << stem << ".png achieved_loss " << g9(loss) << "\n";
  }
}

void cmd_degrade(const RunConfig& cfg, std::ostream& out) {
  const auto paths = list_pngs(cfg.data.eval_dir);
  if (cfg.corruption_specs.empty()) throw ConfigError("degrade requires data.corruptions");
  for (const auto& spec : cfg.corruption_specs) {
    const std::string dir = cfg.out_dir + "/" + sanitize(spec.label());
    ensure_dir(dir);
    for (size_t i = 0; i < paths.size(); ++i) {
      CorruptionSpec per = spec;
      per.seed = derive_seed(spec.seed, i);
      const Image img = load_image(paths[i]);
      save_image(degrade(img, per), dir + "/" + fs::path(paths[i]).filename().string());
    }
    out << "degrade: " << paths.size() << " images -> " << dir << "\n";
  }
}

void cmd_ablate(const RunConfig& cfg, std::ostream& out) {
  auto train_pairs = load_train_pairs(cfg);
  auto eval_pairs = load_eval_pairs(cfg);

  // shared starting point for every cell
  TrainState base_state = initial_state(cfg);
  if (cfg.checkpoint.empty()) {
    TrainCsv csv(cfg.out_dir + "/train-ablate-pretrain.csv", false);
    const std::string ckpt = cfg.out_dir + "/checkpoint-ablate-pretrain.rsr";
    TrainHooks hooks = make_hooks(csv, ckpt);
    pretrain_clean(base_state, train_pairs, cfg.train, hooks);
    save_checkpoint(base_state, ckpt);
    out << "ablate: pretrained shared checkpoint to iter " << base_state.iter << "\n";
  }

  struct Cell {
    AttackConfig atk;
  };
  std::vector<Cell> cells;
  cells.push_back({cfg.train.attack});  // base row
  for (double e : cfg.ablate.epsilon) {
    Cell c{cfg.train.attack};
    c.atk.epsilon = e;
    cells.push_back(c);
  }
  for (int it : cfg.ablate.iters) {
    Cell c{cfg.train.attack};
    c.atk.iters = it;
    cells.push_back(c);
  }
  for (double sscale : cfg.ablate.structure) {
    Cell c{cfg.train.attack};
    c.atk.structure_scale = sscale;
    cells.push_back(c);
  }
  for (const auto& sel : cfg.ablate.loss) {
    Cell c{cfg.train.attack};
    if (sel == "l1") {
      c.atk.use_l1 = true;
      c.atk.use_percep = false;
    } else if (sel == "percep") {
      c.atk.use_l1 = false;
      c.atk.use_percep = true;
    } else {
      c.atk.use_l1 = true;
      c.atk.use_percep = true;
    }
    cells.push_back(c);
  }

  std::vector<std::string> groups = {"clean"};
  for (const auto& spec : cfg.corruption_specs) groups.push_back(spec.label());

  const std::string path = cfg.out_dir + "/ablation.csv";
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path);
  os << "epsilon,iters,structure,loss";
  for (const auto& gname : groups)
    os << ",psnr_" << sanitize(gname) << ",ssim_" << sanitize(gname) << ",percep_"
       << sanitize(gname);
  os << ",psnr_avg,ssim_avg,percep_avg\n";
  os.flush();

  for (size_t ci = 0; ci < cells.size(); ++ci) {
    TrainState st = base_state;  // deep copy: cells never contaminate each other
    TrainConfig tc = cfg.train;
    tc.attack = cells[ci].atk;
    tc.l1_warmup_iters = 0;
    tc.total_iters = st.iter + cfg.ablate.robust_iters;
    robust_train(st, train_pairs, tc);
    MetricReport report = evaluate(st.bundle, eval_pairs, cfg.corruption_specs);
    auto aggs = report.aggregates();

    os << g9(tc.attack.epsilon) << ',' << tc.attack.iters << ',' << g9(tc.attack.structure_scale)
       << ',' << loss_name(tc.attack);
    double ap = 0, as = 0, ae = 0;
    int groups_in_avg = 0;
    for (const auto& gname : groups) {
      const auto& agg = aggs.at(gname);
      os << ',' << g9(agg.psnr_db) << ',' << g9(agg.ssim_v) << ',' << g9(agg.percep);
      if (gname != "clean" || groups.size() == 1) {  // averages cover the corrupted sets
        ap += agg.psnr_db;
        as += agg.ssim_v;
        ae += agg.percep;
        ++groups_in_avg;
      }
    }
    os << ',' << g9(ap / groups_in_avg) << ',' << g9(as / groups_in_avg) << ','
       << g9(ae / groups_in_avg) << '\n';
    os.flush();  // partial results survive interruption
    out << "ablate: row " << (ci + 1) << "/" << cells.size() << " done (epsilon "
        << g9(tc.attack.epsilon) << ", iters " << tc.attack.iters << ", structure "
        << g9(tc.attack.structure_scale) << ", loss " << loss_name(tc.attack) << ")\n";
  }
  out << "ablate: " << cells.size() << " rows -> " << path << "\n";
}

const char* kUsage =
    "usage: rsrlab <command> --config PATH [--section.key value ...]\n"
    "commands:\n"
    "  gen-corpus    synthesize a deterministic train/eval PNG corpus\n"
    "  pretrain      stage-1 clean training (L1 warmup, then GAN)\n"
    "  robust-train  stage-2 adversarial training from a checkpoint\n"
    "  attack        export PGD adversarial examples with sidecars\n"
    "  eval          metric report (clean + corrupted) for a checkpoint\n"
    "  degrade       write corrupted copies of a folder\n"
    "  ablate        attack-hyperparameter sweep, one CSV row per cell\n"
    "environment: RSRLAB_SEED overrides run.seed\n";

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.empty() || args[0] == "help" || args[0] == "--help") {
      out << kUsage;
      return args.empty() ? 2 : 0;
    }
    const std::string command = args[0];

    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    for (size_t i = 1; i < args.size(); ++i) {
      const std::string& a = args[i];
      if (a.rfind("--", 0) != 0) throw ArgumentError("expected --flag, got: " + a);
      if (i + 1 >= args.size()) throw ArgumentError("missing value for " + a);
      const std::string value = args[++i];
      if (a == "--config") {
        if (!config_path.empty()) throw ArgumentError("--config given twice");
        config_path = value;
      } else {
        overrides.emplace_back(a.substr(2), value);
      }
    }

    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream is(config_path, std::ios::binary);
      if (!is) throw IoError("cannot open config: " + config_path);
      std::ostringstream ss;
      ss << is.rdbuf();
      cfg = parse_config(ss.str());
    }
    for (const auto& [key, value] : overrides) cfg.apply(key, value);
    if (const char* env = std::getenv("RSRLAB_SEED"); env != nullptr && *env != '\0')
      cfg.apply("run.seed", env);
    cfg.resolve();

    ensure_dir(cfg.out_dir);
    write_text(cfg.out_dir + "/resolved-config", cfg.echo());

    if (command == "gen-corpus")
      cmd_gen_corpus(cfg, out);
    else if (command == "pretrain")
      cmd_pretrain(cfg, out);
    else if (command == "robust-train")
      cmd_robust_train(cfg, out);
    else if (command == "attack")
      cmd_attack(cfg, out);
    else if (command == "eval")
      cmd_eval(cfg, out);
    else if (command == "degrade")
      cmd_degrade(cfg, out);
    else if (command == "ablate")
      cmd_ablate(cfg, out);
    else {
      err << "unknown command: " << command << "\n" << kUsage;
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rsrlab
