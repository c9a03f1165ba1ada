#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "aad/core/tensor.hpp"
#include "aad/metrics/percentile.hpp"

namespace aad::metrics {

inline constexpr double kTemporalPercentile = 50.0;
inline constexpr std::size_t kTemporalTopK = 5;

struct TemporalEnergy {
  std::vector<double> energy;  // per frame inside the interval; 0 elsewhere
  double threshold = 0.0;
};

// Per-frame band sums of the isolated anomaly spectrogram over [col_begin,
// col_end) (its cells already hold log energies) and their percentile.
inline TemporalEnergy temporal_energy(const Matrix<double>& anomaly_spec, std::size_t col_begin,
                                      std::size_t col_end, double q = kTemporalPercentile) {
  require(col_begin < col_end, Errc::parameter, "temporal injection interval is empty");
  require(col_end <= anomaly_spec.rows(), Errc::bounds, "temporal interval exceeds the spectrogram");
  TemporalEnergy e;
  e.energy.assign(anomaly_spec.rows(), 0.0);
  std::vector<double> inside;
  for (std::size_t t = col_begin; t < col_end; ++t) {
    const auto row = anomaly_spec.row(t);
    e.energy[t] = std::accumulate(row.begin(), row.end(), 0.0);
    inside.push_back(e.energy[t]);
  }
  e.threshold = percentile(inside, q);
  return e;
}

// Frame t is anomalous iff it lies in the interval and E_t > p50 (strict).
inline std::vector<std::uint8_t> temporal_ground_truth(const Matrix<double>& anomaly_spec,
                                                       std::size_t col_begin, std::size_t col_end,
                                                       double q = kTemporalPercentile) {
  const auto e = temporal_energy(anomaly_spec, col_begin, col_end, q);
  std::vector<std::uint8_t> gt(anomaly_spec.rows(), 0);
  for (std::size_t t = col_begin; t < col_end; ++t) gt[t] = e.energy[t] > e.threshold ? 1 : 0;
  return gt;
}

// Mean of the k largest values of each frame (all values when fewer than k).
inline std::vector<double> temporal_scores(const Matrix<double>& map, std::size_t k = kTemporalTopK) {
  require(!map.empty(), Errc::shape, "empty anomaly map");
  std::vector<double> out(map.rows());
  std::vector<double> row;
  for (std::size_t t = 0; t < map.rows(); ++t) {
    row.assign(map.row(t).begin(), map.row(t).end());
    const std::size_t n = std::min(k, row.size());
    std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n), row.end(), std::greater<>());
    out[t] = std::accumulate(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n), 0.0) /
             static_cast<double>(n);
  }
  return out;
}

}  // namespace aad::metrics
