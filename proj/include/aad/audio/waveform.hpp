#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "aad/core/error.hpp"

namespace aad::audio {

// Mono PCM signal, amplitudes nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  std::size_t size() const noexcept { return samples.size(); }
  double duration_s() const noexcept {
    return static_cast<double>(samples.size()) / sample_rate;
  }

  void validate() const {
    require(sample_rate > 0, Errc::parameter, "sample rate must be positive");
    require(!samples.empty(), Errc::length, "waveform is empty");
    for (double s : samples)
      require(std::isfinite(s), Errc::parameter, "waveform contains non-finite samples");
  }
};

// Mean squared amplitude over [begin, end).
inline double mean_power(const std::vector<double>& x, std::size_t begin, std::size_t end) {
  if (end <= begin) return 0.0;
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) acc += x[i] * x[i];
  return acc / static_cast<double>(end - begin);
}

inline double peak(const std::vector<double>& x) {
  double p = 0.0;
  for (double s : x) p = std::max(p, std::abs(s));
  return p;
}

}  // namespace aad::audio
