#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "aad/core/error.hpp"
#include "aad/core/tensor.hpp"

namespace aad::metrics {

// Sample-level score of a spectrogram.
using SpectrogramScorer = std::function<double(const Matrix<double>&)>;

struct FaithfulnessResult {
  double ff_v1 = 0.0;  // f(x) - f(x * M)
  double ff_v2 = 0.0;  // f(x) - f(x * (1 - M) + bg * M)
  double score_x = 0.0;
  double score_v1 = 0.0;
  double score_v2 = 0.0;
};

// Element-wise masking on spectrogram values with a normalized map M.
// `score_x` may carry a precomputed f(x).
inline FaithfulnessResult faithfulness(const SpectrogramScorer& f, const Matrix<double>& x,
                                       const Matrix<double>& m, const Matrix<double>& bg,
                                       std::optional<double> score_x = std::nullopt) {
  require(x.same_shape(m) && x.same_shape(bg), Errc::shape, "spectrogram, map and background differ in shape");
  Matrix<double> v1(x.rows(), x.cols()), v2(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double mi = m.data()[i];
    v1.data()[i] = x.data()[i] * mi;
    v2.data()[i] = x.data()[i] * (1.0 - mi) + bg.data()[i] * mi;
  }
  FaithfulnessResult r;
  r.score_x = score_x ? *score_x : f(x);
  r.score_v1 = f(v1);
  r.score_v2 = f(v2);
  r.ff_v1 = r.score_x - r.score_v1;
  r.ff_v2 = r.score_x - r.score_v2;
  return r;
}

struct MeanStd {
  double mean = std::nan("");
  double std = std::nan("");
};

// Population standard deviation; NaN for an empty set.
inline MeanStd mean_std(std::span<const double> v) {
  if (v.empty()) return {};
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, std::sqrt(s / static_cast<double>(v.size()))};
}

}  // namespace aad::metrics
