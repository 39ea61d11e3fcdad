#pragma once

#include <cstdint>
#include <vector>

#include "atclab/geometry.hpp"

namespace atclab {

// Per-class direction vectors. Class labels are 1-based everywhere: label j
// owns centers[j - 1]. The angular losses keep every center at unit norm;
// the Euclidean losses run the same container unnormalized.
struct CenterBank {
  int dim = 0;
  std::vector<Vec> centers;

  int num_classes() const { return static_cast<int>(centers.size()); }
  const Vec& center(int label) const { return centers[label - 1]; }
  Vec& center(int label) { return centers[label - 1]; }
};

// Accumulated per-class update, same shape as the bank. Classes untouched by
// a batch keep a zero row.
struct CenterDelta {
  int dim = 0;
  std::vector<Vec> delta;

  int num_classes() const { return static_cast<int>(delta.size()); }
  const Vec& row(int label) const { return delta[label - 1]; }
  Vec& row(int label) { return delta[label - 1]; }
};

// Entries i.i.d. Gaussian(0, 0.01), each center then L2-normalized.
// Deterministic given seed. Throws InvalidShapeError for num_classes < 2 or
// dim < 2.
CenterBank init_centers(int num_classes, int dim, std::uint64_t seed);

struct NearestNegative {
  int index = 0;    // class label of the nearest negative center
  double angle = 0.0;
};

// Closest center by angular distance among classes != label; ties go to the
// smallest label. f_norm must be unit-norm.
NearestNegative nearest_negative(const CenterBank& bank, const Vec& f_norm,
                                 int label);

// sin(alpha) and sin(beta) are floored at this value inside the center
// update: the update rule is singular at angles 0 and pi.
inline constexpr double kSinFloor = 1e-7;

// One batch sample as seen by the center update. alpha is the angle to the
// own-class center, beta the angle to the nearest negative center, and
// active flags a positive sample loss.
struct CenterUpdateRecord {
  Vec f_norm;
  int label = 0;
  int hard = 0;
  double alpha = 0.0;
  double beta = 0.0;
  bool active = false;
};

// Averaged angular update; with n_j counting active samples in each role,
//   delta_j =   sum_{active, hard_i=j} f_i / sin(beta_i)  / (1 + n_j)
//             - sum_{active, y_i=j}    f_i / sin(alpha_i) / (1 + n_j).
// Inactive or empty batches yield an all-zero delta.
CenterDelta accumulate_center_delta(const CenterBank& bank,
                                    const std::vector<CenterUpdateRecord>& batch);

// The same averaging scheme over explicit per-sample center gradients:
// own_grad is dL_i/dc_{y_i} and hard_grad is dL_i/dc_{hard_i}. hard == 0
// means the sample has no hard-negative term (center loss).
struct CenterGradRecord {
  int label = 0;
  int hard = 0;
  bool active = false;
  Vec own_grad;
  Vec hard_grad;
};

CenterDelta averaged_center_delta(int num_classes, int dim,
                                  const std::vector<CenterGradRecord>& batch);

// c_j <- normalize(c_j - lr_center * delta_j) for every class. Throws
// ZeroVectorError when an update annihilates a center.
void apply_center_update(CenterBank& bank, const CenterDelta& delta,
                         double lr_center);

// Euclidean-bank variant: the same step without the renormalization.
void apply_center_update_raw(CenterBank& bank, const CenterDelta& delta,
                             double lr_center);

}  // namespace atclab
