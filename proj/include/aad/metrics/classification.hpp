#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "aad/core/error.hpp"

namespace aad::metrics {

namespace detail {

inline std::pair<std::size_t, std::size_t> class_counts(std::span<const double> scores,
                                                        std::span<const std::uint8_t> labels) {
  require(scores.size() == labels.size(), Errc::shape, "scores and labels differ in length");
  std::size_t pos = 0;
  for (auto l : labels) pos += l ? 1 : 0;
  const std::size_t neg = labels.size() - pos;
  require(pos > 0 && neg > 0, Errc::metric_undefined, "both classes must be present");
  return {pos, neg};
}

}  // namespace detail

// Rank-based AUROC (Mann-Whitney); ties count one half.
inline double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  const auto [pos, neg] = detail::class_counts(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]]) rank_sum += avg_rank;
    i = j;
  }
  const double p = static_cast<double>(pos), n = static_cast<double>(neg);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

struct F1Result {
  double f1 = 0.0;
  double threshold = 0.0;
};

inline double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

// Max F1 over thresholds at every distinct score (predict score >= t); the
// lowest maximizing threshold is reported.
inline F1Result best_f1(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  [[maybe_unused]] const auto [pos, neg] = detail::class_counts(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
  F1Result best{-1.0, 0.0};
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? tp : fp) += 1;
      ++j;
    }
    const double f1 = f1_from_counts(tp, fp, pos - tp);
    if (f1 >= best.f1) best = {f1, scores[order[i]]};
    i = j;
  }
  return best;
}

}  // namespace aad::metrics
