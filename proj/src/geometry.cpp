#include "atclab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace atclab {

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatchError("dot: " + std::to_string(a.size()) + " vs " +
                                 std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * b[i];
  }
  return s;
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

Vec l2_normalize(const Vec& v) {
  const double n = norm(v);
  if (n < kZeroNormEps) {
    throw ZeroVectorError("l2_normalize: vector norm below zero threshold");
  }
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = v[i] / n;
  }
  return out;
}

double cosine_similarity(const Vec& a, const Vec& b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na < kZeroNormEps || nb < kZeroNormEps) {
    throw ZeroVectorError("cosine_similarity: zero vector operand");
  }
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double cosine_distance(const Vec& a, const Vec& b) {
  return 1.0 - cosine_similarity(a, b);
}

double angular_distance(const Vec& a, const Vec& b) {
  return std::acos(cosine_similarity(a, b));
}

double squared_euclidean_half(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatchError("squared_euclidean_half: " +
                                 std::to_string(a.size()) + " vs " +
                                 std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return 0.5 * s;
}

}  // namespace atclab
