#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atclab/data.hpp"
#include "atclab/eval.hpp"
#include "atclab/losses.hpp"
#include "atclab/model.hpp"

namespace atclab {

enum class LossKind {
  atcl,
  atcl_softmax,
  cosine_tcl,
  euclidean_tcl,
  softmax,
  center_softmax,
  triplet,
};

// Spellings used by configs and the CLI: "atcl", "atcl+softmax",
// "cosine_tcl", "euclidean_tcl", "softmax", "center+softmax", "triplet".
std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

// True for the losses whose center bank lives on the unit sphere and is
// renormalized after every update.
bool uses_normalized_bank(LossKind kind);
bool uses_center_bank(LossKind kind);
bool uses_classifier_head(LossKind kind);

struct TrainConfig {
  double lr_net = 1e-4;
  double lr_center = 1e-4;
  double momentum = 0.9;
  double weight_decay = 2e-4;
  int batch_size = 20;
  int epochs = 120;
  int lr_drop_epoch = 80;      // epochs >= this run at lr_net * lr_drop_factor
  double lr_drop_factor = 0.1;
  std::uint64_t seed = 1;
  LossKind loss_kind = LossKind::atcl;
  double margin = 0.7;
  double lambda = 1.0;
  int hidden_dim = 64;
  int embed_dim = 32;
  int eval_every = 10;  // validation MAP cadence in epochs; 0 disables
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double lr = 0.0;
  double val_map = 0.0;
  bool has_val_map = false;
};

struct TrainResult {
  EmbeddingModel model;
  CenterBank bank;
  std::vector<EpochStats> history;
};

// v <- momentum * v + (grad + weight_decay * param); param <- param - lr * v.
void sgd_update(std::vector<double>& param, const std::vector<double>& grad,
                std::vector<double>& velocity, double lr, double momentum,
                double weight_decay);

struct SgdState {
  ModelGrads velocity;

  static SgdState zeros_like(const EmbeddingModel& m) {
    return {ModelGrads::zeros_like(m)};
  }
};

// One SGD-with-momentum step on the network from the configured loss, plus
// the averaged center update on the bank. Returns the pre-update batch loss.
double backward_step(EmbeddingModel& model, SgdState& sgd, CenterBank& bank,
                     const std::vector<const Sample*>& batch,
                     const TrainConfig& cfg, double lr_net_now);

// Shuffled mini-batch epochs over train_set; validation MAP on val_set every
// eval_every epochs (and on the last one). Deterministic given cfg.seed.
TrainResult train(EmbeddingModel model, CenterBank bank,
                  const Dataset& train_set, const Dataset& val_set,
                  const TrainConfig& cfg);

// Convenience: builds the model and bank from cfg before training.
TrainResult train(const Dataset& train_set, const Dataset& val_set,
                  int num_classes, const TrainConfig& cfg);

EmbeddingSet embed_dataset(const EmbeddingModel& model, const Dataset& ds);

}  // namespace atclab
