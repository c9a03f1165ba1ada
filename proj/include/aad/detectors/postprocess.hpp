#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aad/detectors/anomaly_map.hpp"
#include "aad/features/align.hpp"
#include "aad/features/pyramid.hpp"

namespace aad::detectors {

inline constexpr double kDefaultSmoothingSigma = 4.0;

// Normalized Gaussian taps for offsets -r..r, r = ceil(4 sigma).
inline std::vector<double> gaussian_kernel(double sigma) {
  const auto r = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
  for (std::ptrdiff_t i = -r; i <= r; ++i)
    k[static_cast<std::size_t>(i + r)] = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
  const double s = std::accumulate(k.begin(), k.end(), 0.0);
  for (double& v : k) v /= s;
  return k;
}

// Half-sample symmetric boundary (d c b a | a b c d | d c b a).
inline std::size_t mirror(std::ptrdiff_t i, std::size_t n) {
  const auto len = static_cast<std::ptrdiff_t>(n);
  const std::ptrdiff_t period = 2 * len;
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < len ? i : period - 1 - i);
}

// Separable Gaussian blur; sigma <= 0 is the identity.
inline Matrix<double> gaussian_blur(const Matrix<double>& in, double sigma) {
  if (sigma <= 0.0 || in.empty()) return in;
  const auto k = gaussian_kernel(sigma);
  const auto r = static_cast<std::ptrdiff_t>(k.size() / 2);
  Matrix<double> tmp(in.rows(), in.cols());
  for (std::size_t i = 0; i < in.rows(); ++i)
    for (std::size_t j = 0; j < in.cols(); ++j) {
      double acc = 0.0;
      for (std::ptrdiff_t d = -r; d <= r; ++d)
        acc += k[static_cast<std::size_t>(d + r)] *
               in(i, mirror(static_cast<std::ptrdiff_t>(j) + d, in.cols()));
      tmp(i, j) = acc;
    }
  Matrix<double> out(in.rows(), in.cols());
  for (std::size_t i = 0; i < in.rows(); ++i)
    for (std::size_t j = 0; j < in.cols(); ++j) {
      double acc = 0.0;
      for (std::ptrdiff_t d = -r; d <= r; ++d)
        acc += k[static_cast<std::size_t>(d + r)] *
               tmp(mirror(static_cast<std::ptrdiff_t>(i) + d, in.rows()), j);
      out(i, j) = acc;
    }
  return out;
}

// Patch-resolution map -> T x F heatmap: bilinear upsample, Gaussian blur,
// optional min-max normalization.
inline AnomalyMap postprocess(const AnomalyMap& patch_map, const std::vector<features::CellRect>& coord_map,
                              std::size_t rows, std::size_t cols,
                              double smoothing_sigma = kDefaultSmoothingSigma, bool normalize = false) {
  patch_map.validate();
  require(coord_map.size() == patch_map.values.size(), Errc::shape,
          "coord map size does not match the patch map");
  std::vector<unsigned char> covered(rows * cols, 0);
  for (const auto& rect : coord_map) {
    require(rect.row_end <= rows && rect.col_end <= cols, Errc::shape, "coord map exceeds the target shape");
    for (std::size_t r = rect.row_begin; r < rect.row_end; ++r)
      for (std::size_t c = rect.col_begin; c < rect.col_end; ++c) covered[r * cols + c] = 1;
  }
  for (auto v : covered) require(v != 0, Errc::shape, "coord map does not cover the spectrogram");

  AnomalyMap out;
  out.detector = patch_map.detector;
  out.sample_id = patch_map.sample_id;
  out.values = gaussian_blur(features::resize_bilinear(patch_map.values, rows, cols), smoothing_sigma);
  return normalize ? normalize_minmax(std::move(out)) : out;
}

enum class SampleReduction { max, mean, top_k_mean };

inline std::string_view to_string(SampleReduction r) {
  switch (r) {
    case SampleReduction::max: return "max";
    case SampleReduction::mean: return "mean";
    case SampleReduction::top_k_mean: return "top_k_mean";
  }
  return "max";
}

inline std::optional<SampleReduction> parse_sample_reduction(std::string_view s) {
  for (auto r : {SampleReduction::max, SampleReduction::mean, SampleReduction::top_k_mean})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

// Map -> one sample-level anomaly score.
inline double sample_score(const AnomalyMap& m, SampleReduction how = SampleReduction::max,
                           std::size_t top_k = 10) {
  require(!m.values.empty(), Errc::shape, "cannot score an empty map");
  const auto& v = m.values.data();
  switch (how) {
    case SampleReduction::max:
      return *std::max_element(v.begin(), v.end());
    case SampleReduction::mean:
      return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    case SampleReduction::top_k_mean: {
      std::vector<double> s = v;
      const std::size_t k = std::clamp<std::size_t>(top_k, 1, s.size());
      std::partial_sort(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k), s.end(), std::greater<>());
      return std::accumulate(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k), 0.0) / static_cast<double>(k);
    }
  }
  return 0.0;
}

}  // namespace aad::detectors
