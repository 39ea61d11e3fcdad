#pragma once

#include <vector>

#include "atclab/error.hpp"

namespace atclab {

using Vec = std::vector<double>;

// Norms below this are treated as zero vectors.
inline constexpr double kZeroNormEps = 1e-12;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& v);

// v / ||v||_2. Throws ZeroVectorError when ||v||_2 < kZeroNormEps.
Vec l2_normalize(const Vec& v);

// Cosine of the angle between a and b, clamped to [-1, 1] so that downstream
// acos never sees a rounding excursion outside its domain.
double cosine_similarity(const Vec& a, const Vec& b);

// 1 - cos(a, b), in [0, 2].
double cosine_distance(const Vec& a, const Vec& b);

// acos of the clamped cosine, in [0, pi].
double angular_distance(const Vec& a, const Vec& b);

// 0.5 * ||a - b||^2.
double squared_euclidean_half(const Vec& a, const Vec& b);

}  // namespace atclab
