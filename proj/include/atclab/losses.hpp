#pragma once

#include <vector>

#include "atclab/centers.hpp"
#include "atclab/geometry.hpp"

namespace atclab {

struct MarginConfig {
  // Radians for the angular loss, cosine units for the cosine loss,
  // half-squared-Euclidean units for the Euclidean losses.
  double margin = 0.7;
  // Weight of the metric term when combined with softmax.
  double lambda = 1.0;
};

// Per-sample summary in the metric native to the loss: angles (alpha, beta)
// for the angular/cosine losses, half squared Euclidean distances for the
// Euclidean ones. hard is the nearest negative class label (0 when the loss
// has none) and active flags a positive sample loss.
struct PerSampleTerm {
  double pos = 0.0;
  double neg = 0.0;
  int hard = 0;
  bool active = false;
};

struct Batch {
  std::vector<Vec> features;
  std::vector<int> labels;  // 1-based class labels

  int size() const { return static_cast<int>(features.size()); }
};

struct LossOutput {
  double loss = 0.0;
  // dL/df_i in raw feature space; one row per sample, zero rows for inactive
  // samples. Empty for losses that never touch the features (softmax).
  std::vector<Vec> grad_features;
  // dL/dlogits_i; only filled by the softmax-bearing losses.
  std::vector<Vec> grad_logits;
  // Averaged per-class center update; zero-shaped for center-free losses.
  CenterDelta center_delta;
  std::vector<PerSampleTerm> per_sample;
};

// Hinge on (alpha_i + margin - beta_i) over normalized features and centers:
//   L = sum_i max(alpha_i + m - beta_i, 0)
// with dL/df~_i = [c~_hard/sin(beta_i) - c~_pos/sin(alpha_i)] for active
// samples, chained through the normalization Jacobian (I - f~f~^T)/||f|| to
// give raw-space gradients. Centers must be unit norm.
LossOutput atcl(const Batch& batch, const CenterBank& bank,
                const MarginConfig& cfg);

// Cosine-margin variant: L = sum_i max(cos(beta_i) + m - cos(alpha_i), 0).
LossOutput cosine_tcl(const Batch& batch, const CenterBank& bank,
                      const MarginConfig& cfg);

// Triplet-center loss over raw features and an unnormalized bank:
//   L = sum_i max(D(f_i, c_y) + m - min_{j != y} D(f_i, c_j), 0),
// D = half squared Euclidean distance.
LossOutput euclidean_tcl(const Batch& batch, const CenterBank& bank,
                         const MarginConfig& cfg);

// Mean cross-entropy with log-sum-exp stabilization. grad_logits rows are
// (softmax(z_i) - onehot(y_i)) / M, matching the mean reduction.
LossOutput softmax_xent(const std::vector<Vec>& logits,
                        const std::vector<int>& labels);

// All valid in-batch triplets (anchor, positive, negative), squared Euclidean
// distance: L = sum max(||a-p||^2 - ||a-n||^2 + m, 0). Throws
// BatchTooSmallError when no valid triplet exists.
LossOutput triplet_loss(const Batch& batch, const MarginConfig& cfg);

// L = sum_i 0.5 * ||f_i - c_{y_i}||^2 over raw features, with the averaged
// center update counting every sample of the class.
LossOutput center_loss(const Batch& batch, const CenterBank& bank);

// L_total = L_softmax + lambda * L_atcl. The center delta stays the plain
// angular update, unscaled by lambda; lambda weights only the feature path.
LossOutput joint_loss(const Batch& batch, const CenterBank& bank,
                      const std::vector<Vec>& logits, const MarginConfig& cfg);

}  // namespace atclab
