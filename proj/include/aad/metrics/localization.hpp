#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "aad/core/tensor.hpp"
#include "aad/detectors/anomaly_map.hpp"
#include "aad/features/pyramid.hpp"
#include "aad/metrics/classification.hpp"
#include "aad/metrics/percentile.hpp"

namespace aad::metrics {

enum class MaskRole { ground_truth, prediction };

struct BinaryMask {
  Matrix<std::uint8_t> values;
  MaskRole role = MaskRole::ground_truth;

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(values.data().begin(), values.data().end(), 1));
  }
};

inline constexpr double kGroundTruthTopFraction = 0.4;
inline constexpr double kPredictionPercentile = 40.0;
inline constexpr double kDefaultProFprLimit = 0.3;

// Inside `region`, marks the ceil(fraction * |region|) highest-energy cells of
// the isolated anomaly spectrogram; every cell tied with the k-th largest
// value is marked too.
inline BinaryMask spect_ground_truth(const Matrix<double>& anomaly_spec, const features::CellRect& region,
                                     double top_fraction = kGroundTruthTopFraction) {
  require(region.row_begin < region.row_end && region.col_begin < region.col_end, Errc::parameter,
          "injection region is empty");
  require(region.row_end <= anomaly_spec.rows() && region.col_end <= anomaly_spec.cols(), Errc::bounds,
          "injection region exceeds the spectrogram");
  require(top_fraction > 0.0 && top_fraction <= 1.0, Errc::parameter, "top fraction must be in (0, 1]");
  std::vector<double> vals;
  for (std::size_t r = region.row_begin; r < region.row_end; ++r)
    for (std::size_t c = region.col_begin; c < region.col_end; ++c) vals.push_back(anomaly_spec(r, c));
  const auto n = static_cast<double>(vals.size());
  const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(top_fraction * n - 1e-9)), 1,
                                         vals.size());
  std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(k - 1), vals.end(),
                   std::greater<>());
  const double threshold = vals[k - 1];

  BinaryMask m{Matrix<std::uint8_t>(anomaly_spec.rows(), anomaly_spec.cols(), 0), MaskRole::ground_truth};
  for (std::size_t r = region.row_begin; r < region.row_end; ++r)
    for (std::size_t c = region.col_begin; c < region.col_end; ++c)
      m.values(r, c) = anomaly_spec(r, c) >= threshold ? 1 : 0;
  return m;
}

// Cells strictly above the map's own 40th percentile.
inline BinaryMask spect_prediction(const Matrix<double>& map, double q = kPredictionPercentile) {
  require(!map.empty(), Errc::shape, "empty anomaly map");
  const double p = percentile(map.data(), q);
  BinaryMask m{Matrix<std::uint8_t>(map.rows(), map.cols(), 0), MaskRole::prediction};
  for (std::size_t i = 0; i < map.size(); ++i) m.values.data()[i] = map.data()[i] > p ? 1 : 0;
  return m;
}

// 4-connected components of marked cells; labels are 1-based, 0 = unmarked.
inline std::pair<std::vector<std::uint32_t>, std::size_t> label_regions(const Matrix<std::uint8_t>& mask) {
  const std::size_t rows = mask.rows(), cols = mask.cols();
  std::vector<std::uint32_t> label(rows * cols, 0);
  std::uint32_t next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < label.size(); ++start) {
    if (!mask.data()[start] || label[start]) continue;
    label[start] = ++next;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      const std::size_t r = cur / cols, c = cur % cols;
      auto visit = [&](std::size_t rr, std::size_t cc) {
        const std::size_t idx = rr * cols + cc;
        if (mask.data()[idx] && !label[idx]) {
          label[idx] = next;
          stack.push_back(idx);
        }
      };
      if (r > 0) visit(r - 1, c);
      if (r + 1 < rows) visit(r + 1, c);
      if (c > 0) visit(r, c - 1);
      if (c + 1 < cols) visit(r, c + 1);
    }
  }
  return {std::move(label), next};
}

// Area under the per-region-overlap curve against cell-level FPR, integrated
// (trapezoid) over [0, fpr_limit] and divided by fpr_limit. Regions are the
// 4-connected components of each ground-truth mask.
inline double au_pro(std::span<const Matrix<double>> maps, std::span<const BinaryMask> gts,
                     double fpr_limit = kDefaultProFprLimit) {
  require(maps.size() == gts.size(), Errc::shape, "map and mask counts differ");
  require(fpr_limit > 0.0 && fpr_limit <= 1.0, Errc::parameter, "FPR limit must be in (0, 1]");
  struct Cell {
    double value;
    std::uint32_t region;  // 0 = negative
  };
  std::vector<Cell> cells;
  std::vector<double> inv_size{0.0};
  for (std::size_t i = 0; i < maps.size(); ++i) {
    require(maps[i].rows() == gts[i].values.rows() && maps[i].cols() == gts[i].values.cols(), Errc::shape,
            "map and mask shapes differ");
    const auto [labels, n] = label_regions(gts[i].values);
    const auto base = static_cast<std::uint32_t>(inv_size.size() - 1);
    std::vector<std::size_t> sizes(n + 1, 0);
    for (auto l : labels) ++sizes[l];
    for (std::size_t r = 1; r <= n; ++r) inv_size.push_back(1.0 / static_cast<double>(sizes[r]));
    for (std::size_t k = 0; k < labels.size(); ++k)
      cells.push_back({maps[i].data()[k], labels[k] ? base + labels[k] : 0});
  }
  const std::size_t n_regions = inv_size.size() - 1;
  const auto negatives = static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const Cell& c) { return c.region == 0; }));
  require(n_regions > 0, Errc::metric_undefined, "no anomalous cells in ground truth");
  require(negatives > 0, Errc::metric_undefined, "no normal cells in ground truth");

  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.value > b.value; });
  std::vector<std::size_t> hits(n_regions + 1, 0);
  std::size_t fp = 0;
  double x0 = 0.0, y0 = 0.0, area = 0.0;
  for (std::size_t i = 0; i < cells.size();) {
    std::size_t j = i;
    while (j < cells.size() && cells[j].value == cells[i].value) {
      if (cells[j].region == 0)
        ++fp;
      else
        ++hits[cells[j].region];
      ++j;
    }
    i = j;
    double overlap = 0.0;
    for (std::size_t r = 1; r <= n_regions; ++r) overlap += static_cast<double>(hits[r]) * inv_size[r];
    const double x1 = static_cast<double>(fp) / static_cast<double>(negatives);
    const double y1 = overlap / static_cast<double>(n_regions);
    if (x1 >= fpr_limit) {
      const double y_lim = x1 > x0 ? y0 + (y1 - y0) * (fpr_limit - x0) / (x1 - x0) : y1;
      area += (fpr_limit - x0) * (y0 + y_lim) / 2.0;
      return area / fpr_limit;
    }
    area += (x1 - x0) * (y0 + y1) / 2.0;
    x0 = x1;
    y0 = y1;
  }
  return area / fpr_limit;
}

struct SpectLevelMetrics {
  double f1 = 0.0;
  double roc = 0.0;
  double pro = 0.0;
};

// F1 pools spect_prediction (on each min-max normalized map) against ground
// truth over every cell; ROC and PRO use raw map values pooled across maps.
inline SpectLevelMetrics spect_level_metrics(std::span<const Matrix<double>> maps,
                                             std::span<const BinaryMask> gts,
                                             double fpr_limit = kDefaultProFprLimit,
                                             double prediction_q = kPredictionPercentile) {
  require(maps.size() == gts.size() && !maps.empty(), Errc::shape, "need matching, non-empty maps and masks");
  std::size_t tp = 0, fp = 0, fn = 0;
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    require(maps[i].rows() == gts[i].values.rows() && maps[i].cols() == gts[i].values.cols(), Errc::shape,
            "map and mask shapes differ");
    detectors::AnomalyMap am;
    am.values = maps[i];
    const auto pred = spect_prediction(detectors::normalize_minmax(am).values, prediction_q);
    for (std::size_t k = 0; k < maps[i].size(); ++k) {
      const bool g = gts[i].values.data()[k] != 0;
      const bool p = pred.values.data()[k] != 0;
      tp += g && p;
      fp += !g && p;
      fn += g && !p;
      scores.push_back(maps[i].data()[k]);
      labels.push_back(g ? 1 : 0);
    }
  }
  SpectLevelMetrics out;
  out.f1 = f1_from_counts(tp, fp, fn);
  out.roc = roc_auc(scores, labels);
  out.pro = au_pro(maps, gts, fpr_limit);
  return out;
}

}  // namespace aad::metrics
