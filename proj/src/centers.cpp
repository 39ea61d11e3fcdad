#include "atclab/centers.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "atclab/rng.hpp"

namespace atclab {

CenterBank init_centers(int num_classes, int dim, std::uint64_t seed) {
  if (num_classes < 2 || dim < 2) {
    throw InvalidShapeError("init_centers: need num_classes >= 2 and dim >= 2, got " +
                            std::to_string(num_classes) + " x " + std::to_string(dim));
  }
  Rng rng(seed);
  CenterBank bank;
  bank.dim = dim;
  bank.centers.assign(num_classes, Vec(dim));
  for (auto& c : bank.centers) {
    for (auto& x : c) {
      x = rng.normal(0.0, 0.01);
    }
    c = l2_normalize(c);
  }
  return bank;
}

NearestNegative nearest_negative(const CenterBank& bank, const Vec& f_norm,
                                 int label) {
  NearestNegative best;
  best.angle = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= bank.num_classes(); ++j) {
    if (j == label) {
      continue;
    }
    const double angle = angular_distance(f_norm, bank.center(j));
    if (angle < best.angle) {
      best.angle = angle;
      best.index = j;
    }
  }
  return best;
}

CenterDelta accumulate_center_delta(const CenterBank& bank,
                                    const std::vector<CenterUpdateRecord>& batch) {
  const int K = bank.num_classes();
  const int dim = bank.dim;
  std::vector<Vec> hard_num(K, Vec(dim, 0.0));
  std::vector<Vec> own_num(K, Vec(dim, 0.0));
  std::vector<int> hard_cnt(K, 0);
  std::vector<int> own_cnt(K, 0);

  for (const auto& rec : batch) {
    if (!rec.active) {
      continue;
    }
    const double sb = std::max(std::sin(rec.beta), kSinFloor);
    const double sa = std::max(std::sin(rec.alpha), kSinFloor);
    Vec& hn = hard_num[rec.hard - 1];
    Vec& on = own_num[rec.label - 1];
    for (int t = 0; t < dim; ++t) {
      hn[t] += rec.f_norm[t] / sb;
      on[t] += rec.f_norm[t] / sa;
    }
    ++hard_cnt[rec.hard - 1];
    ++own_cnt[rec.label - 1];
  }

  CenterDelta out;
  out.dim = dim;
  out.delta.assign(K, Vec(dim, 0.0));
  for (int j = 0; j < K; ++j) {
    const double hd = 1.0 + hard_cnt[j];
    const double od = 1.0 + own_cnt[j];
    for (int t = 0; t < dim; ++t) {
      out.delta[j][t] = hard_num[j][t] / hd - own_num[j][t] / od;
    }
  }
  return out;
}

CenterDelta averaged_center_delta(int num_classes, int dim,
                                  const std::vector<CenterGradRecord>& batch) {
  std::vector<Vec> hard_num(num_classes, Vec(dim, 0.0));
  std::vector<Vec> own_num(num_classes, Vec(dim, 0.0));
  std::vector<int> hard_cnt(num_classes, 0);
  std::vector<int> own_cnt(num_classes, 0);

  for (const auto& rec : batch) {
    if (!rec.active) {
      continue;
    }
    if (rec.hard > 0) {
      Vec& hn = hard_num[rec.hard - 1];
      for (int t = 0; t < dim; ++t) {
        hn[t] += rec.hard_grad[t];
      }
      ++hard_cnt[rec.hard - 1];
    }
    Vec& on = own_num[rec.label - 1];
    for (int t = 0; t < dim; ++t) {
      on[t] += rec.own_grad[t];
    }
    ++own_cnt[rec.label - 1];
  }

  CenterDelta out;
  out.dim = dim;
  out.delta.assign(num_classes, Vec(dim, 0.0));
  for (int j = 0; j < num_classes; ++j) {
    const double hd = 1.0 + hard_cnt[j];
    const double od = 1.0 + own_cnt[j];
    for (int t = 0; t < dim; ++t) {
      out.delta[j][t] = hard_num[j][t] / hd + own_num[j][t] / od;
    }
  }
  return out;
}

void apply_center_update(CenterBank& bank, const CenterDelta& delta,
                         double lr_center) {
  for (int j = 1; j <= bank.num_classes(); ++j) {
    Vec& c = bank.center(j);
    const Vec& d = delta.row(j);
    for (int t = 0; t < bank.dim; ++t) {
      c[t] -= lr_center * d[t];
    }
    c = l2_normalize(c);
  }
}

void apply_center_update_raw(CenterBank& bank, const CenterDelta& delta,
                             double lr_center) {
  for (int j = 1; j <= bank.num_classes(); ++j) {
    Vec& c = bank.center(j);
    const Vec& d = delta.row(j);
    for (int t = 0; t < bank.dim; ++t) {
      c[t] -= lr_center * d[t];
    }
  }
}

}  // namespace atclab
