#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "aad/detectors/anomaly_map.hpp"

namespace aad::detectors {

struct MemoryBank {
  Matrix<float> coreset;  // N x C
  double fraction = 1.0;
  std::size_t source_count = 0;

  std::size_t size() const noexcept { return coreset.rows(); }
  std::size_t dim() const noexcept { return coreset.cols(); }
  friend bool operator==(const MemoryBank&, const MemoryBank&) = default;
};

inline constexpr double kDefaultCoresetFraction = 0.01;

// Squared Euclidean distance, summed in index order. Stops early once the
// partial sum exceeds `bound`; the returned value is then only a lower bound.
// Partial sums of non-negative terms never decrease, so callers that only
// care about values <= bound get the exact result.
inline double squared_distance(std::span<const float> a, std::span<const float> b,
                               double bound = std::numeric_limits<double>::infinity()) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = static_cast<double>(a[k]) - static_cast<double>(b[k]);
    acc += d * d;
    if (acc > bound) return acc;
  }
  return acc;
}

inline std::size_t coreset_size(double fraction, std::size_t source_count) {
  const auto n = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(source_count)));
  return std::clamp<std::size_t>(n, 1, source_count);
}

// Greedy k-center (farthest point) selection. Starts from row 0; ties go to
// the lowest index. Returns selected row indices in selection order.
inline std::vector<std::size_t> greedy_coreset(const Matrix<float>& pool, std::size_t n) {
  require(pool.rows() > 0, Errc::data, "empty patch pool");
  n = std::min(n, pool.rows());
  std::vector<std::size_t> selected;
  selected.reserve(n);
  std::vector<double> min_d(pool.rows());
  for (std::size_t i = 0; i < pool.rows(); ++i) min_d[i] = squared_distance(pool.row(i), pool.row(0));
  selected.push_back(0);
  while (selected.size() < n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < min_d.size(); ++i)
      if (min_d[i] > min_d[best]) best = i;
    selected.push_back(best);
    const auto center = pool.row(best);
    for (std::size_t i = 0; i < pool.rows(); ++i) {
      const double d = squared_distance(pool.row(i), center, min_d[i]);
      if (d < min_d[i]) min_d[i] = d;
    }
  }
  return selected;
}

inline Matrix<float> pool_patches(std::span<const Tensor3<float>> grids) {
  require(!grids.empty(), Errc::data, "no training grids");
  const std::size_t c = grids.front().channels();
  std::size_t rows = 0;
  for (const auto& g : grids) {
    require(g.channels() == c, Errc::shape, "training grids differ in channel count");
    rows += g.positions();
  }
  Matrix<float> pool(rows, c);
  std::size_t r = 0;
  for (const auto& g : grids)
    for (std::size_t p = 0; p < g.positions(); ++p, ++r) {
      const auto v = g.vec(p);
      std::copy(v.begin(), v.end(), pool.row(r).begin());
    }
  return pool;
}

// `seed` is accepted for interface symmetry; selection is fully determined by
// pool order.
inline MemoryBank patchcore_fit(std::span<const Tensor3<float>> train, double fraction,
                                [[maybe_unused]] std::uint64_t seed = 0) {
  require(fraction > 0.0 && fraction <= 1.0, Errc::parameter, "coreset fraction must be in (0, 1]");
  require(!train.empty(), Errc::data, "PatchCore needs at least one training grid");
  const auto pool = pool_patches(train);
  require(pool.rows() > 0, Errc::data, "empty patch pool");

  MemoryBank bank;
  bank.fraction = fraction;
  bank.source_count = pool.rows();
  const std::size_t n = coreset_size(fraction, pool.rows());
  if (n == pool.rows()) {
    bank.coreset = pool;
    return bank;
  }
  const auto idx = greedy_coreset(pool, n);
  bank.coreset = Matrix<float>(idx.size(), pool.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto src = pool.row(idx[i]);
    std::copy(src.begin(), src.end(), bank.coreset.row(i).begin());
  }
  return bank;
}

// Exact 1-NN distance; `hint` is a bank row tried first to tighten the bound.
inline double nearest_distance(std::span<const float> q, const MemoryBank& bank, std::size_t& hint) {
  double best = squared_distance(q, bank.coreset.row(hint));
  std::size_t arg = hint;
  for (std::size_t i = 0; i < bank.size(); ++i) {
    if (i == hint) continue;
    const double d = squared_distance(q, bank.coreset.row(i), best);
    if (d < best) {
      best = d;
      arg = i;
    }
  }
  hint = arg;
  return std::sqrt(best);
}

inline AnomalyMap patchcore_score(const Tensor3<float>& grid, const MemoryBank& bank) {
  require(bank.size() > 0, Errc::data, "memory bank is empty");
  require(grid.channels() == bank.dim(), Errc::shape,
          "grid has " + std::to_string(grid.channels()) + " channels, memory bank has " +
              std::to_string(bank.dim()));
  AnomalyMap m;
  m.detector = "patchcore";
  m.values = Matrix<double>(grid.height(), grid.width());
  std::size_t hint = 0;
  for (std::size_t p = 0; p < grid.positions(); ++p)
    m.values.data()[p] = nearest_distance(grid.vec(p), bank, hint);
  return m;
}

}  // namespace aad::detectors
