#include "atclab/model.hpp"

#include "atclab/rng.hpp"

namespace atclab {

EmbeddingModel EmbeddingModel::init(int in_dim, int hidden_dim, int embed_dim,
                                    int num_classes, std::uint64_t seed) {
  if (in_dim < 1 || hidden_dim < 1 || embed_dim < 2 || num_classes < 2) {
    throw InvalidShapeError("EmbeddingModel::init: bad shape");
  }
  EmbeddingModel m;
  m.in_dim = in_dim;
  m.hidden_dim = hidden_dim;
  m.embed_dim = embed_dim;
  m.num_classes = num_classes;
  m.w1.resize(static_cast<std::size_t>(hidden_dim) * in_dim);
  m.b1.resize(hidden_dim);
  m.w2.resize(static_cast<std::size_t>(embed_dim) * hidden_dim);
  m.b2.resize(embed_dim);
  m.head_w.resize(static_cast<std::size_t>(num_classes) * embed_dim);
  m.head_b.resize(num_classes);
  Rng rng(seed);
  for (auto* p : m.params()) {
    for (auto& x : *p) {
      x = rng.normal(0.0, 0.01);
    }
  }
  return m;
}

Vec EmbeddingModel::forward(const Vec& x) const {
  ForwardCache cache;
  return forward_cached(x, cache);
}

Vec EmbeddingModel::forward_cached(const Vec& x, ForwardCache& cache) const {
  if (static_cast<int>(x.size()) != in_dim) {
    throw DimensionMismatchError("EmbeddingModel::forward: input dim " +
                                 std::to_string(x.size()));
  }
  cache.h_pre.assign(hidden_dim, 0.0);
  cache.h.assign(hidden_dim, 0.0);
  for (int r = 0; r < hidden_dim; ++r) {
    double s = b1[r];
    const double* row = &w1[static_cast<std::size_t>(r) * in_dim];
    for (int c = 0; c < in_dim; ++c) {
      s += row[c] * x[c];
    }
    cache.h_pre[r] = s;
    cache.h[r] = s > 0.0 ? s : 0.0;
  }
  cache.f.assign(embed_dim, 0.0);
  for (int r = 0; r < embed_dim; ++r) {
    double s = b2[r];
    const double* row = &w2[static_cast<std::size_t>(r) * hidden_dim];
    for (int c = 0; c < hidden_dim; ++c) {
      s += row[c] * cache.h[c];
    }
    cache.f[r] = s;
  }
  return cache.f;
}

Vec EmbeddingModel::logits(const Vec& f) const {
  Vec z(num_classes);
  for (int k = 0; k < num_classes; ++k) {
    double s = head_b[k];
    const double* row = &head_w[static_cast<std::size_t>(k) * embed_dim];
    for (int j = 0; j < embed_dim; ++j) {
      s += row[j] * f[j];
    }
    z[k] = s;
  }
  return z;
}

std::vector<std::vector<double>*> EmbeddingModel::params() {
  return {&w1, &b1, &w2, &b2, &head_w, &head_b};
}

std::vector<const std::vector<double>*> EmbeddingModel::params() const {
  return {&w1, &b1, &w2, &b2, &head_w, &head_b};
}

const std::vector<std::string>& EmbeddingModel::param_names() {
  static const std::vector<std::string> names = {"w1", "b1", "w2",
                                                 "b2", "head_w", "head_b"};
  return names;
}

ModelGrads ModelGrads::zeros_like(const EmbeddingModel& m) {
  ModelGrads g;
  g.w1.assign(m.w1.size(), 0.0);
  g.b1.assign(m.b1.size(), 0.0);
  g.w2.assign(m.w2.size(), 0.0);
  g.b2.assign(m.b2.size(), 0.0);
  g.head_w.assign(m.head_w.size(), 0.0);
  g.head_b.assign(m.head_b.size(), 0.0);
  return g;
}

std::vector<std::vector<double>*> ModelGrads::params() {
  return {&w1, &b1, &w2, &b2, &head_w, &head_b};
}

void accumulate_backward(const EmbeddingModel& m, const Vec& x,
                         const EmbeddingModel::ForwardCache& cache,
                         const Vec& grad_f, const Vec* grad_logits,
                         ModelGrads& grads) {
  Vec df(m.embed_dim, 0.0);
  if (!grad_f.empty()) {
    df = grad_f;
  }
  if (grad_logits != nullptr) {
    const Vec& gl = *grad_logits;
    for (int k = 0; k < m.num_classes; ++k) {
      grads.head_b[k] += gl[k];
      const std::size_t off = static_cast<std::size_t>(k) * m.embed_dim;
      for (int j = 0; j < m.embed_dim; ++j) {
        grads.head_w[off + j] += gl[k] * cache.f[j];
        df[j] += m.head_w[off + j] * gl[k];
      }
    }
  }

  Vec dh(m.hidden_dim, 0.0);
  for (int r = 0; r < m.embed_dim; ++r) {
    grads.b2[r] += df[r];
    const std::size_t off = static_cast<std::size_t>(r) * m.hidden_dim;
    for (int c = 0; c < m.hidden_dim; ++c) {
      grads.w2[off + c] += df[r] * cache.h[c];
      dh[c] += m.w2[off + c] * df[r];
    }
  }
  for (int r = 0; r < m.hidden_dim; ++r) {
    if (cache.h_pre[r] <= 0.0) {
      continue;  // rectifier subgradient 0 at the kink
    }
    grads.b1[r] += dh[r];
    const std::size_t off = static_cast<std::size_t>(r) * m.in_dim;
    for (int c = 0; c < m.in_dim; ++c) {
      grads.w1[off + c] += dh[r] * x[c];
    }
  }
}

}  // namespace atclab
