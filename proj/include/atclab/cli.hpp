#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atclab/data.hpp"
#include "atclab/trainer.hpp"

namespace atclab::cli {

// Full resolved configuration of one run: defaults, overlaid by an optional
// JSON config file, overlaid by command-line flags. Every run echoes the
// resolved form to <out>/manifest.json, which is itself a valid config file.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::string out = "out";
  SynthConfig data;
  std::string data_path;  // read train/val/test files from here instead of generating
  TrainConfig train;
  int hist_bins = 40;
  int f_cutoff = 0;  // 0: per-query min(#relevant, 1000)
  std::string sweep_axis;
  std::vector<double> sweep_values;
};

ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& ec);

// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& ec);

void save_checkpoint(const std::string& dir, const EmbeddingModel& model,
                     const CenterBank& bank);
struct Checkpoint {
  EmbeddingModel model;
  CenterBank bank;
};
Checkpoint load_checkpoint(const std::string& dir, const ExperimentConfig& ec);

// Entry point behind the binary. args excludes the program name.
// Exit codes: 0 success, 1 runtime error, 2 usage error.
int run(const std::vector<std::string>& args);

}  // namespace atclab::cli
