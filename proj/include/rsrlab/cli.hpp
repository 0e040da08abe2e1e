#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rsrlab/dataio.hpp"
#include "rsrlab/train.hpp"

namespace rsrlab {

struct DataConfig {
  std::string train_dir;
  std::string eval_dir;
  int patch_size = 32;    // LR pixels; HR patches are patch_size * scale
  int patch_stride = 32;  // LR pixels
  int max_patches = 0;    // 0 = keep all; otherwise a seeded subset
  std::vector<std::string> corruptions = {"gaussian:0.04", "salt_pepper:0.02", "quantize:16"};
};

// one-axis-at-a-time sweep around the base attack config; the base row itself
// is always emitted first
struct AblateConfig {
  std::vector<double> epsilon = {10.0 / 255, 12.0 / 255, 14.0 / 255, 16.0 / 255, 18.0 / 255};
  std::vector<int> iters = {2, 4, 6, 8};
  std::vector<double> structure = {1.0, 2.0};
  std::vector<std::string> loss = {"l1", "percep"};
  int64_t robust_iters = 50;  // robust iterations per cell on top of the shared checkpoint
};

// procedural test corpus (gen-corpus command)
struct CorpusConfig {
  int train_count = 12;
  int eval_count = 4;
  int size = 160;  // HR pixels, square
};

// the whole experiment surface: one file, strict keys, all defaults live here
struct RunConfig {
  uint64_t seed = 0;
  std::string out_dir = "out";
  std::string checkpoint;  // input checkpoint for commands that consume one

  DataConfig data;
  GeneratorConfig model;
  TrainConfig train;
  AblateConfig ablate;
  CorpusConfig corpus;

  std::vector<CorruptionSpec> corruption_specs;  // filled by resolve()

  // set one dotted key ("attack.epsilon"); unknown keys and bad values throw
  void apply(const std::string& key, const std::string& value);
  // derive dependent seeds, parse corruption labels, validate everything
  void resolve();
  // config-file text of every effective value; re-parsing it reproduces the
  // exact same resolved configuration
  std::string echo() const;
};

// parse a config document: `key = value` lines under `[section]` headers,
// `#` comments; unknown keys are errors, missing keys keep defaults
RunConfig parse_config(const std::string& text);

// numeric literal with fraction support ("14/255"); used by config values
double parse_number(const std::string& key, const std::string& text);

// full CLI: rsrlab <command> --config PATH [--section.key value ...]
// returns the process exit code; errors are printed to err
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rsrlab
