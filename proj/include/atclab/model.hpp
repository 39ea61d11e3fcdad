#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atclab/geometry.hpp"

namespace atclab {

// Affine -> rectifier -> affine embedding network, plus an affine classifier
// head on the unnormalized embedding. Weight matrices are row-major
// [rows x cols]: w1 is [hidden x in], w2 is [embed x hidden], head_w is
// [classes x embed].
struct EmbeddingModel {
  int in_dim = 0;
  int hidden_dim = 0;
  int embed_dim = 0;
  int num_classes = 0;

  std::vector<double> w1, b1, w2, b2, head_w, head_b;

  // All parameters i.i.d. Gaussian(0, 0.01); deterministic given seed.
  static EmbeddingModel init(int in_dim, int hidden_dim, int embed_dim,
                             int num_classes, std::uint64_t seed);

  Vec forward(const Vec& x) const;

  struct ForwardCache {
    Vec h_pre;  // hidden pre-activation
    Vec h;      // rectified hidden
    Vec f;      // embedding
  };
  Vec forward_cached(const Vec& x, ForwardCache& cache) const;

  // Classifier head applied to an embedding.
  Vec logits(const Vec& f) const;

  // Uniform views over the six parameter arrays, in a fixed order shared
  // with gradients, SGD state and checkpoints.
  std::vector<std::vector<double>*> params();
  std::vector<const std::vector<double>*> params() const;
  static const std::vector<std::string>& param_names();
};

// Gradient (or velocity) buffers shaped like a model's parameters.
struct ModelGrads {
  std::vector<double> w1, b1, w2, b2, head_w, head_b;

  static ModelGrads zeros_like(const EmbeddingModel& m);
  std::vector<std::vector<double>*> params();
};

// Accumulates one sample's backward pass into grads. grad_f is dL/df for the
// embedding (may be empty when the loss has no feature path); grad_logits is
// dL/dlogits or nullptr when the head is unused.
void accumulate_backward(const EmbeddingModel& m, const Vec& x,
                         const EmbeddingModel::ForwardCache& cache,
                         const Vec& grad_f, const Vec* grad_logits,
                         ModelGrads& grads);

}  // namespace atclab
