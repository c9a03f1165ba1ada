#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "aad/audio/fft.hpp"
#include "aad/audio/waveform.hpp"
#include "aad/core/tensor.hpp"

namespace aad::audio {

struct SpectrogramParams {
  int n_fft = 1024;
  int hop = 512;
  int n_mels = 64;
  double fmin = 50.0;
  double fmax = 8000.0;
  double log_offset = 1e-6;

  void validate(int sample_rate) const {
    require(n_fft > 0 && hop > 0 && hop <= n_fft, Errc::parameter,
            "need 0 < hop <= n_fft");
    require(n_mels >= 1, Errc::parameter, "n_mels must be >= 1");
    require(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0, Errc::parameter,
            "need 0 <= fmin < fmax <= sample_rate / 2");
    require(log_offset > 0.0, Errc::parameter, "log_offset must be positive");
  }

  friend bool operator==(const SpectrogramParams&, const SpectrogramParams&) = default;
};

// T x F log-mel energies; rows are frames, cols are mel bands.
struct Spectrogram {
  Matrix<double> values;
  SpectrogramParams params;
  int sample_rate = 16000;

  std::size_t frames() const noexcept { return values.rows(); }
  std::size_t bands() const noexcept { return values.cols(); }
  double floor_value() const { return std::log(params.log_offset); }
};

inline std::size_t frame_count(std::size_t length, int n_fft, int hop) {
  if (length < static_cast<std::size_t>(n_fft)) return 0;
  return 1 + (length - static_cast<std::size_t>(n_fft)) / static_cast<std::size_t>(hop);
}

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Center frequency of each triangular band (HTK spacing).
inline std::vector<double> mel_band_centers(const SpectrogramParams& p) {
  const double lo = hz_to_mel(p.fmin);
  const double hi = hz_to_mel(p.fmax);
  std::vector<double> c(static_cast<std::size_t>(p.n_mels));
  for (int m = 0; m < p.n_mels; ++m)
    c[static_cast<std::size_t>(m)] = mel_to_hz(lo + (hi - lo) * (m + 1) / (p.n_mels + 1));
  return c;
}

// n_mels x (n_fft/2 + 1) triangular weights with unit peak.
inline Matrix<double> mel_filterbank(const SpectrogramParams& p, int sample_rate) {
  const std::size_t bins = static_cast<std::size_t>(p.n_fft / 2 + 1);
  const double lo = hz_to_mel(p.fmin);
  const double hi = hz_to_mel(p.fmax);
  std::vector<double> edges(static_cast<std::size_t>(p.n_mels + 2));
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) / (p.n_mels + 1));

  Matrix<double> fb(static_cast<std::size_t>(p.n_mels), bins);
  for (std::size_t m = 0; m < fb.rows(); ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / p.n_fft;
      const double up = (f - left) / (center - left);
      const double down = (right - f) / (right - center);
      fb(m, k) = std::max(0.0, std::min(up, down));
    }
  }
  return fb;
}

// Periodic Hann window.
inline std::vector<double> hann_window(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    w[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

// Hann-windowed STFT power -> mel filterbank -> log(energy + log_offset).
inline Spectrogram log_mel_spectrogram(const Waveform& w, const SpectrogramParams& p = {}) {
  w.validate();
  p.validate(w.sample_rate);
  require(w.size() >= static_cast<std::size_t>(p.n_fft), Errc::length,
          "clip of " + std::to_string(w.size()) + " samples is shorter than one frame (" +
              std::to_string(p.n_fft) + ")");

  const std::size_t frames = frame_count(w.size(), p.n_fft, p.hop);
  const auto fb = mel_filterbank(p, w.sample_rate);
  const auto window = hann_window(p.n_fft);
  PowerSpectrum fft(static_cast<std::size_t>(p.n_fft));

  Spectrogram s;
  s.params = p;
  s.sample_rate = w.sample_rate;
  s.values = Matrix<double>(frames, static_cast<std::size_t>(p.n_mels));

  std::vector<double> frame(static_cast<std::size_t>(p.n_fft));
  std::vector<double> power(fft.bins());
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t off = t * static_cast<std::size_t>(p.hop);
    for (std::size_t i = 0; i < frame.size(); ++i) frame[i] = w.samples[off + i] * window[i];
    fft(frame, power);
    for (std::size_t m = 0; m < fb.rows(); ++m) {
      double e = 0.0;
      const auto weights = fb.row(m);
      for (std::size_t k = 0; k < power.size(); ++k) e += weights[k] * power[k];
      s.values(t, m) = std::log(e + p.log_offset);
    }
  }
  return s;
}

// Frames [first, last) whose analysis window overlaps samples [begin, end).
inline std::pair<std::size_t, std::size_t> frames_overlapping(std::size_t begin, std::size_t end,
                                                              const SpectrogramParams& p,
                                                              std::size_t frames) {
  const auto n_fft = static_cast<std::size_t>(p.n_fft);
  const auto hop = static_cast<std::size_t>(p.hop);
  if (end <= begin || frames == 0) return {0, 0};
  // Frame t covers [t*hop, t*hop + n_fft).
  const std::size_t first = begin + 1 > n_fft ? (begin + 1 - n_fft + hop - 1) / hop : 0;
  const std::size_t last = std::min(frames, (end - 1) / hop + 1);
  return {std::min(first, last), last};
}

}  // namespace aad::audio
