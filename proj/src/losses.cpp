#include "atclab/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace atclab {

namespace {

// Applies the Jacobian of f -> f/||f||, i.e. (I - f~f~^T) g / ||f||.
Vec chain_through_normalization(const Vec& f_hat, double f_norm, const Vec& g) {
  const double proj = dot(g, f_hat);
  Vec out(f_hat.size());
  for (std::size_t t = 0; t < f_hat.size(); ++t) {
    out[t] = (g[t] - proj * f_hat[t]) / f_norm;
  }
  return out;
}

CenterDelta zero_delta(int num_classes, int dim) {
  CenterDelta d;
  d.dim = dim;
  d.delta.assign(num_classes, Vec(dim, 0.0));
  return d;
}

}  // namespace

LossOutput atcl(const Batch& batch, const CenterBank& bank,
                const MarginConfig& cfg) {
  const int M = batch.size();
  const int dim = bank.dim;
  LossOutput out;
  out.grad_features.assign(M, Vec(dim, 0.0));
  out.per_sample.resize(M);

  std::vector<CenterUpdateRecord> recs(M);
  for (int i = 0; i < M; ++i) {
    const Vec& f = batch.features[i];
    const double fn = norm(f);
    if (fn < kZeroNormEps) {
      throw ZeroVectorError("atcl: zero feature vector");
    }
    Vec f_hat(dim);
    for (int t = 0; t < dim; ++t) {
      f_hat[t] = f[t] / fn;
    }
    const int y = batch.labels[i];
    const double alpha = angular_distance(f_hat, bank.center(y));
    const auto nn = nearest_negative(bank, f_hat, y);
    const bool active = alpha + cfg.margin - nn.angle > 0.0;
    if (active) {
      out.loss += alpha + cfg.margin - nn.angle;
      const double sa = std::max(std::sin(alpha), kSinFloor);
      const double sb = std::max(std::sin(nn.angle), kSinFloor);
      const Vec& c_pos = bank.center(y);
      const Vec& c_hard = bank.center(nn.index);
      Vec g(dim);
      for (int t = 0; t < dim; ++t) {
        g[t] = c_hard[t] / sb - c_pos[t] / sa;
      }
      out.grad_features[i] = chain_through_normalization(f_hat, fn, g);
    }
    out.per_sample[i] = {alpha, nn.angle, nn.index, active};
    recs[i] = {std::move(f_hat), y, nn.index, alpha, nn.angle, active};
  }
  out.center_delta = accumulate_center_delta(bank, recs);
  return out;
}

LossOutput cosine_tcl(const Batch& batch, const CenterBank& bank,
                      const MarginConfig& cfg) {
  const int M = batch.size();
  const int dim = bank.dim;
  LossOutput out;
  out.grad_features.assign(M, Vec(dim, 0.0));
  out.per_sample.resize(M);

  std::vector<CenterGradRecord> recs(M);
  for (int i = 0; i < M; ++i) {
    const Vec& f = batch.features[i];
    const double fn = norm(f);
    if (fn < kZeroNormEps) {
      throw ZeroVectorError("cosine_tcl: zero feature vector");
    }
    Vec f_hat(dim);
    for (int t = 0; t < dim; ++t) {
      f_hat[t] = f[t] / fn;
    }
    const int y = batch.labels[i];
    const double alpha = angular_distance(f_hat, bank.center(y));
    const auto nn = nearest_negative(bank, f_hat, y);
    const double li = std::cos(nn.angle) + cfg.margin - std::cos(alpha);
    const bool active = li > 0.0;
    recs[i].label = y;
    recs[i].hard = nn.index;
    recs[i].active = active;
    if (active) {
      out.loss += li;
      const Vec& c_pos = bank.center(y);
      const Vec& c_hard = bank.center(nn.index);
      Vec g(dim);
      for (int t = 0; t < dim; ++t) {
        g[t] = c_hard[t] - c_pos[t];
      }
      out.grad_features[i] = chain_through_normalization(f_hat, fn, g);
      // dL_i/dc~_hard = f~, dL_i/dc~_pos = -f~
      recs[i].hard_grad = f_hat;
      recs[i].own_grad.resize(dim);
      for (int t = 0; t < dim; ++t) {
        recs[i].own_grad[t] = -f_hat[t];
      }
    }
    out.per_sample[i] = {alpha, nn.angle, nn.index, active};
  }
  out.center_delta = averaged_center_delta(bank.num_classes(), dim, recs);
  return out;
}

LossOutput euclidean_tcl(const Batch& batch, const CenterBank& bank,
                         const MarginConfig& cfg) {
  const int M = batch.size();
  const int dim = bank.dim;
  LossOutput out;
  out.grad_features.assign(M, Vec(dim, 0.0));
  out.per_sample.resize(M);

  std::vector<CenterGradRecord> recs(M);
  for (int i = 0; i < M; ++i) {
    const Vec& f = batch.features[i];
    const int y = batch.labels[i];
    const double d_pos = squared_euclidean_half(f, bank.center(y));
    int hard = 0;
    double d_neg = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= bank.num_classes(); ++j) {
      if (j == y) {
        continue;
      }
      const double d = squared_euclidean_half(f, bank.center(j));
      if (d < d_neg) {
        d_neg = d;
        hard = j;
      }
    }
    const double li = d_pos + cfg.margin - d_neg;
    const bool active = li > 0.0;
    recs[i].label = y;
    recs[i].hard = hard;
    recs[i].active = active;
    if (active) {
      out.loss += li;
      const Vec& c_pos = bank.center(y);
      const Vec& c_hard = bank.center(hard);
      recs[i].own_grad.resize(dim);
      recs[i].hard_grad.resize(dim);
      for (int t = 0; t < dim; ++t) {
        out.grad_features[i][t] = c_hard[t] - c_pos[t];
        recs[i].own_grad[t] = c_pos[t] - f[t];
        recs[i].hard_grad[t] = f[t] - c_hard[t];
      }
    }
    out.per_sample[i] = {d_pos, d_neg, hard, active};
  }
  out.center_delta = averaged_center_delta(bank.num_classes(), dim, recs);
  return out;
}

LossOutput softmax_xent(const std::vector<Vec>& logits,
                        const std::vector<int>& labels) {
  const int M = static_cast<int>(logits.size());
  LossOutput out;
  out.grad_logits.resize(M);
  for (int i = 0; i < M; ++i) {
    const Vec& z = logits[i];
    const int K = static_cast<int>(z.size());
    const double z_max = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (int k = 0; k < K; ++k) {
      sum += std::exp(z[k] - z_max);
    }
    const double lse = z_max + std::log(sum);
    out.loss += (lse - z[labels[i] - 1]) / M;
    Vec& g = out.grad_logits[i];
    g.resize(K);
    for (int k = 0; k < K; ++k) {
      g[k] = std::exp(z[k] - z_max) / sum / M;
    }
    g[labels[i] - 1] -= 1.0 / M;
  }
  return out;
}

LossOutput triplet_loss(const Batch& batch, const MarginConfig& cfg) {
  const int M = batch.size();
  const int dim = M > 0 ? static_cast<int>(batch.features[0].size()) : 0;
  LossOutput out;
  out.grad_features.assign(M, Vec(dim, 0.0));

  int n_triplets = 0;
  for (int a = 0; a < M; ++a) {
    for (int p = 0; p < M; ++p) {
      if (p == a || batch.labels[p] != batch.labels[a]) {
        continue;
      }
      for (int n = 0; n < M; ++n) {
        if (batch.labels[n] == batch.labels[a]) {
          continue;
        }
        ++n_triplets;
        const double d_ap = 2.0 * squared_euclidean_half(batch.features[a],
                                                         batch.features[p]);
        const double d_an = 2.0 * squared_euclidean_half(batch.features[a],
                                                         batch.features[n]);
        const double l = d_ap - d_an + cfg.margin;
        if (l <= 0.0) {
          continue;
        }
        out.loss += l;
        const Vec& fa = batch.features[a];
        const Vec& fp = batch.features[p];
        const Vec& fn = batch.features[n];
        for (int t = 0; t < dim; ++t) {
          out.grad_features[a][t] += 2.0 * (fn[t] - fp[t]);
          out.grad_features[p][t] += 2.0 * (fp[t] - fa[t]);
          out.grad_features[n][t] += 2.0 * (fa[t] - fn[t]);
        }
      }
    }
  }
  if (n_triplets == 0) {
    throw BatchTooSmallError("triplet_loss: no valid triplet in batch");
  }
  return out;
}

LossOutput center_loss(const Batch& batch, const CenterBank& bank) {
  const int M = batch.size();
  const int dim = bank.dim;
  LossOutput out;
  out.grad_features.assign(M, Vec(dim, 0.0));
  out.per_sample.resize(M);

  std::vector<CenterGradRecord> recs(M);
  for (int i = 0; i < M; ++i) {
    const Vec& f = batch.features[i];
    const int y = batch.labels[i];
    const Vec& c = bank.center(y);
    const double li = squared_euclidean_half(f, c);
    out.loss += li;
    recs[i].label = y;
    recs[i].hard = 0;
    recs[i].active = true;  // every sample of the class counts in the average
    recs[i].own_grad.resize(dim);
    for (int t = 0; t < dim; ++t) {
      out.grad_features[i][t] = f[t] - c[t];
      recs[i].own_grad[t] = c[t] - f[t];
    }
    out.per_sample[i] = {li, 0.0, 0, li > 0.0};
  }
  out.center_delta = averaged_center_delta(bank.num_classes(), dim, recs);
  return out;
}

LossOutput joint_loss(const Batch& batch, const CenterBank& bank,
                      const std::vector<Vec>& logits, const MarginConfig& cfg) {
  LossOutput metric = atcl(batch, bank, cfg);
  LossOutput sm = softmax_xent(logits, batch.labels);

  LossOutput out;
  out.loss = sm.loss + cfg.lambda * metric.loss;
  out.grad_features = std::move(metric.grad_features);
  for (auto& row : out.grad_features) {
    for (auto& g : row) {
      g *= cfg.lambda;
    }
  }
  out.grad_logits = std::move(sm.grad_logits);
  out.center_delta = std::move(metric.center_delta);
  out.per_sample = std::move(metric.per_sample);
  return out;
}

}  // namespace atclab
