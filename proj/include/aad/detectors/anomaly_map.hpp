#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "aad/core/error.hpp"
#include "aad/core/tensor.hpp"

namespace aad::detectors {

// Per-cell anomaly scores. Rows are time (frames or patch rows), cols are
// frequency.
struct AnomalyMap {
  Matrix<double> values;
  bool normalized = false;
  std::string detector;
  std::string sample_id;

  std::size_t rows() const noexcept { return values.rows(); }
  std::size_t cols() const noexcept { return values.cols(); }

  void validate() const {
    require(!values.empty(), Errc::shape, "anomaly map is empty");
    for (double v : values.data())
      require(std::isfinite(v), Errc::numerical, "anomaly map contains non-finite values");
  }
};

// Min-max scaling to [0, 1]; a constant map becomes all zeros.
inline AnomalyMap normalize_minmax(AnomalyMap m) {
  m.validate();
  const auto [lo, hi] = std::minmax_element(m.values.data().begin(), m.values.data().end());
  const double min = *lo, range = *hi - *lo;
  for (double& v : m.values.data()) v = range > 0.0 ? (v - min) / range : 0.0;
  m.normalized = true;
  return m;
}

}  // namespace aad::detectors
