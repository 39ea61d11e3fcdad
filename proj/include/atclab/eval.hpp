#pragma once

#include <vector>

#include "atclab/geometry.hpp"

namespace atclab {

struct EmbeddingSet {
  std::vector<Vec> vectors;
  std::vector<int> labels;  // 1-based class labels

  int size() const { return static_cast<int>(vectors.size()); }
};

// For each query, gallery indices sorted ascending by cosine distance, ties
// broken by gallery index. exclude_self drops the gallery item with the same
// index as the query (for the query-set == gallery protocol).
std::vector<std::vector<int>> rank(const EmbeddingSet& queries,
                                   const EmbeddingSet& gallery,
                                   bool exclude_self);

// AP = (1/R) * sum over relevant ranks k of precision@k; 0 when R = 0.
double average_precision(const std::vector<int>& relevances);

// Area under the precision-recall curve, trapezoidal over recall
// breakpoints, anchored at (recall 0, precision 1); 0 when nothing is
// relevant.
double pr_auc(const std::vector<int>& relevances);

// Precision/recall at the cutoff; F1 = 2PR/(P+R), 0 when P+R = 0.
double f_measure(const std::vector<int>& relevances, int cutoff,
                 int total_relevant);

// DCG = sum_k (2^gain_k - 1)/log2(k+1), normalized by the ideal ordering;
// 0 when the ideal DCG is 0.
double ndcg(const std::vector<double>& gains);

struct MicroMacro {
  double micro = 0.0;  // mean over all queries
  double macro = 0.0;  // mean over classes of per-class means
};

MicroMacro micro_macro(const std::vector<double>& per_query,
                       const std::vector<int>& query_class);

struct RetrievalReport {
  std::vector<double> per_query_ap;
  double map = 0.0;
  double auc = 0.0;
  double f_measure_micro = 0.0;
  double f_measure_macro = 0.0;
  double ndcg_micro = 0.0;
  double ndcg_macro = 0.0;
};

// Binary relevance by label match. f_cutoff <= 0 selects the per-query
// default min(#relevant gallery items, 1000).
RetrievalReport evaluate_retrieval(const EmbeddingSet& queries,
                                   const EmbeddingSet& gallery,
                                   bool exclude_self, int f_cutoff);

struct HistogramReport {
  std::vector<double> bin_edges;        // bins + 1 edges over [0, 2]
  std::vector<long long> intra_counts;  // same-label pairs
  std::vector<long long> inter_counts;  // cross-label pairs
};

// Cosine distances of all unordered pairs, binned over [0, 2].
HistogramReport cosine_histograms(const EmbeddingSet& embeddings, int bins);

}  // namespace atclab
