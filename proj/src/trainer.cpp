#include "atclab/trainer.hpp"

#include <algorithm>
#include <numeric>

#include "atclab/rng.hpp"

namespace atclab {

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::atcl: return "atcl";
    case LossKind::atcl_softmax: return "atcl+softmax";
    case LossKind::cosine_tcl: return "cosine_tcl";
    case LossKind::euclidean_tcl: return "euclidean_tcl";
    case LossKind::softmax: return "softmax";
    case LossKind::center_softmax: return "center+softmax";
    case LossKind::triplet: return "triplet";
  }
  throw ConfigError("unknown loss kind");
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "atcl") return LossKind::atcl;
  if (name == "atcl+softmax") return LossKind::atcl_softmax;
  if (name == "cosine_tcl") return LossKind::cosine_tcl;
  if (name == "euclidean_tcl") return LossKind::euclidean_tcl;
  if (name == "softmax") return LossKind::softmax;
  if (name == "center+softmax") return LossKind::center_softmax;
  if (name == "triplet") return LossKind::triplet;
  throw ConfigError("unknown loss kind: " + name);
}

bool uses_normalized_bank(LossKind kind) {
  return kind == LossKind::atcl || kind == LossKind::atcl_softmax ||
         kind == LossKind::cosine_tcl;
}

bool uses_center_bank(LossKind kind) {
  return kind != LossKind::softmax && kind != LossKind::triplet;
}

bool uses_classifier_head(LossKind kind) {
  return kind == LossKind::atcl_softmax || kind == LossKind::softmax ||
         kind == LossKind::center_softmax;
}

void sgd_update(std::vector<double>& param, const std::vector<double>& grad,
                std::vector<double>& velocity, double lr, double momentum,
                double weight_decay) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    velocity[i] = momentum * velocity[i] + (grad[i] + weight_decay * param[i]);
    param[i] -= lr * velocity[i];
  }
}

double backward_step(EmbeddingModel& model, SgdState& sgd, CenterBank& bank,
                     const std::vector<const Sample*>& batch,
                     const TrainConfig& cfg, double lr_net_now) {
  const int M = static_cast<int>(batch.size());
  if (M == 0) {
    throw BatchTooSmallError("backward_step: empty batch");
  }

  Batch feats;
  feats.features.resize(M);
  feats.labels.resize(M);
  std::vector<EmbeddingModel::ForwardCache> caches(M);
  for (int i = 0; i < M; ++i) {
    model.forward_cached(batch[i]->x, caches[i]);
    feats.features[i] = caches[i].f;
    feats.labels[i] = batch[i]->label;
  }

  std::vector<Vec> logits;
  if (uses_classifier_head(cfg.loss_kind)) {
    logits.resize(M);
    for (int i = 0; i < M; ++i) {
      logits[i] = model.logits(feats.features[i]);
    }
  }

  const MarginConfig mcfg{cfg.margin, cfg.lambda};
  LossOutput lo;
  switch (cfg.loss_kind) {
    case LossKind::atcl:
      lo = atcl(feats, bank, mcfg);
      break;
    case LossKind::atcl_softmax:
      lo = joint_loss(feats, bank, logits, mcfg);
      break;
    case LossKind::cosine_tcl:
      lo = cosine_tcl(feats, bank, mcfg);
      break;
    case LossKind::euclidean_tcl:
      lo = euclidean_tcl(feats, bank, mcfg);
      break;
    case LossKind::softmax:
      lo = softmax_xent(logits, feats.labels);
      break;
    case LossKind::center_softmax: {
      LossOutput sm = softmax_xent(logits, feats.labels);
      LossOutput cl = center_loss(feats, bank);
      lo.loss = sm.loss + cfg.lambda * cl.loss;
      lo.grad_features = std::move(cl.grad_features);
      for (auto& row : lo.grad_features) {
        for (auto& g : row) {
          g *= cfg.lambda;
        }
      }
      lo.grad_logits = std::move(sm.grad_logits);
      lo.center_delta = std::move(cl.center_delta);
      break;
    }
    case LossKind::triplet:
      lo = triplet_loss(feats, mcfg);
      break;
  }

  ModelGrads grads = ModelGrads::zeros_like(model);
  static const Vec kNoFeatureGrad;
  for (int i = 0; i < M; ++i) {
    const Vec& gf =
        lo.grad_features.empty() ? kNoFeatureGrad : lo.grad_features[i];
    const Vec* gl = lo.grad_logits.empty() ? nullptr : &lo.grad_logits[i];
    accumulate_backward(model, batch[i]->x, caches[i], gf, gl, grads);
  }

  auto params = model.params();
  auto grad_views = grads.params();
  auto vel_views = sgd.velocity.params();
  for (std::size_t p = 0; p < params.size(); ++p) {
    sgd_update(*params[p], *grad_views[p], *vel_views[p], lr_net_now,
               cfg.momentum, cfg.weight_decay);
  }

  if (uses_center_bank(cfg.loss_kind)) {
    if (uses_normalized_bank(cfg.loss_kind)) {
      apply_center_update(bank, lo.center_delta, cfg.lr_center);
    } else {
      apply_center_update_raw(bank, lo.center_delta, cfg.lr_center);
    }
  }
  return lo.loss;
}

TrainResult train(EmbeddingModel model, CenterBank bank,
                  const Dataset& train_set, const Dataset& val_set,
                  const TrainConfig& cfg) {
  TrainResult result;
  Rng shuffle_rng(cfg.seed + 2);
  std::vector<int> order(train_set.samples.size());
  std::iota(order.begin(), order.end(), 0);

  SgdState sgd = SgdState::zeros_like(model);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double lr_now =
        cfg.lr_net * (epoch >= cfg.lr_drop_epoch ? cfg.lr_drop_factor : 1.0);
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    int n_batches = 0;
    std::vector<const Sample*> batch;
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      batch.clear();
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(&train_set.samples[order[i]]);
      }
      loss_sum += backward_step(model, sgd, bank, batch, cfg, lr_now);
      ++n_batches;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = n_batches > 0 ? loss_sum / n_batches : 0.0;
    stats.lr = lr_now;
    const bool eval_now =
        cfg.eval_every > 0 && !val_set.samples.empty() &&
        (epoch % cfg.eval_every == 0 || epoch == cfg.epochs);
    if (eval_now) {
      const EmbeddingSet val_emb = embed_dataset(model, val_set);
      stats.val_map = evaluate_retrieval(val_emb, val_emb, true, 0).map;
      stats.has_val_map = true;
    }
    result.history.push_back(stats);
  }

  result.model = std::move(model);
  result.bank = std::move(bank);
  return result;
}

TrainResult train(const Dataset& train_set, const Dataset& val_set,
                  int num_classes, const TrainConfig& cfg) {
  EmbeddingModel model = EmbeddingModel::init(
      train_set.dim, cfg.hidden_dim, cfg.embed_dim, num_classes, cfg.seed);
  CenterBank bank = init_centers(num_classes, cfg.embed_dim, cfg.seed + 1);
  return train(std::move(model), std::move(bank), train_set, val_set, cfg);
}

EmbeddingSet embed_dataset(const EmbeddingModel& model, const Dataset& ds) {
  EmbeddingSet out;
  out.vectors.reserve(ds.samples.size());
  out.labels.reserve(ds.samples.size());
  for (const auto& s : ds.samples) {
    out.vectors.push_back(model.forward(s.x));
    out.labels.push_back(s.label);
  }
  return out;
}

}  // namespace atclab
