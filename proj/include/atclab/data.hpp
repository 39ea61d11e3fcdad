#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atclab/geometry.hpp"

namespace atclab {

struct Sample {
  int label = 0;  // 1-based class label
  Vec x;
};

struct Dataset {
  int dim = 0;
  std::vector<Sample> samples;

  int size() const { return static_cast<int>(samples.size()); }
  int num_classes() const;  // max label, 0 when empty
};

struct SplitDataset {
  Dataset train, val, test;
  int num_classes = 0;
};

struct SynthConfig {
  int num_classes = 10;
  int per_class = 100;
  int dim = 32;
  double spread = 0.25;  // within-class angular std, radians
  std::uint64_t seed = 1;
};

// Clustered directions on the unit sphere: class means drawn uniformly,
// rejection-spaced to pairwise angle >= 0.3 rad; each sample is its class
// mean rotated by |N(0, spread)| radians toward a random tangent, then scaled
// by a magnitude uniform in [0.5, 2]. Split 80/10/10 per class, deterministic
// per seed. Throws ConfigError when the means cannot be spaced after 10000
// rejections.
SplitDataset generate(const SynthConfig& cfg);

// Plain-text vector format shared by datasets, embeddings and checkpoints:
//   dim=<D> count=<N>
//   <label>,<v1> <v2> ... <vD>
// Numbers carry 12 significant digits.
void write_dataset(const std::string& path, const Dataset& ds);
Dataset read_dataset(const std::string& path);

}  // namespace atclab
