#include "atclab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace atclab {

std::vector<std::vector<int>> rank(const EmbeddingSet& queries,
                                   const EmbeddingSet& gallery,
                                   bool exclude_self) {
  std::vector<std::vector<int>> out(queries.size());
  std::vector<std::pair<double, int>> order;
  for (int q = 0; q < queries.size(); ++q) {
    order.clear();
    order.reserve(gallery.size());
    for (int g = 0; g < gallery.size(); ++g) {
      if (exclude_self && g == q) {
        continue;
      }
      order.emplace_back(cosine_distance(queries.vectors[q], gallery.vectors[g]),
                         g);
    }
    std::sort(order.begin(), order.end());
    out[q].reserve(order.size());
    for (const auto& [d, g] : order) {
      out[q].push_back(g);
    }
  }
  return out;
}

double average_precision(const std::vector<int>& relevances) {
  int total = 0;
  for (int r : relevances) {
    total += r != 0 ? 1 : 0;
  }
  if (total == 0) {
    return 0.0;
  }
  double sum = 0.0;
  int hits = 0;
  for (std::size_t k = 0; k < relevances.size(); ++k) {
    if (relevances[k] != 0) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  return sum / total;
}

double pr_auc(const std::vector<int>& relevances) {
  int total = 0;
  for (int r : relevances) {
    total += r != 0 ? 1 : 0;
  }
  if (total == 0) {
    return 0.0;
  }
  double area = 0.0;
  double prev_recall = 0.0;
  double prev_precision = 1.0;
  int hits = 0;
  for (std::size_t k = 0; k < relevances.size(); ++k) {
    if (relevances[k] == 0) {
      continue;
    }
    ++hits;
    const double recall = static_cast<double>(hits) / total;
    const double precision = static_cast<double>(hits) / static_cast<double>(k + 1);
    area += (recall - prev_recall) * (precision + prev_precision) / 2.0;
    prev_recall = recall;
    prev_precision = precision;
  }
  return area;
}

double f_measure(const std::vector<int>& relevances, int cutoff,
                 int total_relevant) {
  if (cutoff <= 0 || total_relevant <= 0) {
    return 0.0;
  }
  const int upto = std::min<int>(cutoff, static_cast<int>(relevances.size()));
  int hits = 0;
  for (int k = 0; k < upto; ++k) {
    hits += relevances[k] != 0 ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / cutoff;
  const double r = static_cast<double>(hits) / total_relevant;
  if (p + r == 0.0) {
    return 0.0;
  }
  return 2.0 * p * r / (p + r);
}

double ndcg(const std::vector<double>& gains) {
  auto dcg = [](const std::vector<double>& g) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      s += (std::exp2(g[k]) - 1.0) / std::log2(static_cast<double>(k + 2));
    }
    return s;
  };
  const double actual = dcg(gains);
  std::vector<double> ideal = gains;
  std::sort(ideal.begin(), ideal.end(), std::greater<double>());
  const double best = dcg(ideal);
  if (best == 0.0) {
    return 0.0;
  }
  return actual / best;
}

MicroMacro micro_macro(const std::vector<double>& per_query,
                       const std::vector<int>& query_class) {
  MicroMacro out;
  if (per_query.empty()) {
    return out;
  }
  out.micro = std::accumulate(per_query.begin(), per_query.end(), 0.0) /
              static_cast<double>(per_query.size());
  std::map<int, std::pair<double, int>> by_class;  // sum, count
  for (std::size_t i = 0; i < per_query.size(); ++i) {
    auto& slot = by_class[query_class[i]];
    slot.first += per_query[i];
    slot.second += 1;
  }
  double macro_sum = 0.0;
  for (const auto& [cls, slot] : by_class) {
    macro_sum += slot.first / slot.second;
  }
  out.macro = macro_sum / static_cast<double>(by_class.size());
  return out;
}

RetrievalReport evaluate_retrieval(const EmbeddingSet& queries,
                                   const EmbeddingSet& gallery,
                                   bool exclude_self, int f_cutoff) {
  const auto rankings = rank(queries, gallery, exclude_self);
  RetrievalReport report;
  std::vector<double> per_query_auc, per_query_f, per_query_ndcg;
  for (int q = 0; q < queries.size(); ++q) {
    const auto& ranked = rankings[q];
    std::vector<int> rel(ranked.size());
    int total_relevant = 0;
    for (std::size_t k = 0; k < ranked.size(); ++k) {
      rel[k] = gallery.labels[ranked[k]] == queries.labels[q] ? 1 : 0;
      total_relevant += rel[k];
    }
    const int cutoff =
        f_cutoff > 0 ? f_cutoff : std::min(total_relevant, 1000);
    report.per_query_ap.push_back(average_precision(rel));
    per_query_auc.push_back(pr_auc(rel));
    per_query_f.push_back(f_measure(rel, cutoff, total_relevant));
    per_query_ndcg.push_back(
        ndcg(std::vector<double>(rel.begin(), rel.end())));
  }
  const auto ap_agg = micro_macro(report.per_query_ap, queries.labels);
  const auto auc_agg = micro_macro(per_query_auc, queries.labels);
  const auto f_agg = micro_macro(per_query_f, queries.labels);
  const auto ndcg_agg = micro_macro(per_query_ndcg, queries.labels);
  report.map = ap_agg.micro;
  report.auc = auc_agg.micro;
  report.f_measure_micro = f_agg.micro;
  report.f_measure_macro = f_agg.macro;
  report.ndcg_micro = ndcg_agg.micro;
  report.ndcg_macro = ndcg_agg.macro;
  return report;
}

HistogramReport cosine_histograms(const EmbeddingSet& embeddings, int bins) {
  if (bins < 1) {
    throw InvalidShapeError("cosine_histograms: bins must be >= 1");
  }
  HistogramReport report;
  report.bin_edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) {
    report.bin_edges[b] = 2.0 * b / bins;
  }
  report.intra_counts.assign(bins, 0);
  report.inter_counts.assign(bins, 0);
  for (int i = 0; i < embeddings.size(); ++i) {
    for (int j = i + 1; j < embeddings.size(); ++j) {
      const double d = cosine_distance(embeddings.vectors[i],
                                       embeddings.vectors[j]);
      int b = static_cast<int>(d / 2.0 * bins);
      b = std::clamp(b, 0, bins - 1);  // distance 2 lands in the last bin
      if (embeddings.labels[i] == embeddings.labels[j]) {
        ++report.intra_counts[b];
      } else {
        ++report.inter_counts[b];
      }
    }
  }
  return report;
}

}  // namespace atclab
