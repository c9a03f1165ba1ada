#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "aad/audio/waveform.hpp"

namespace aad::audio {

// Synthetic stand-ins for the background / anomaly sound categories.
enum class ClipKind {
  tonal_background,
  noise_background,
  chirp_anomaly,
  click_anomaly,
  tone_burst_anomaly,
};

inline std::string_view to_string(ClipKind k) {
  switch (k) {
    case ClipKind::tonal_background: return "tonal_background";
    case ClipKind::noise_background: return "noise_background";
    case ClipKind::chirp_anomaly: return "chirp_anomaly";
    case ClipKind::click_anomaly: return "click_anomaly";
    case ClipKind::tone_burst_anomaly: return "tone_burst_anomaly";
  }
  return "unknown";
}

inline std::optional<ClipKind> parse_clip_kind(std::string_view s) {
  for (auto k : {ClipKind::tonal_background, ClipKind::noise_background,
                 ClipKind::chirp_anomaly, ClipKind::click_anomaly,
                 ClipKind::tone_burst_anomaly})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline bool is_anomaly(ClipKind k) {
  return k == ClipKind::chirp_anomaly || k == ClipKind::click_anomaly ||
         k == ClipKind::tone_burst_anomaly;
}

inline constexpr double kSynthPeak = 0.5;

namespace detail {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline void normalize_peak(std::vector<double>& x, double target) {
  const double p = peak(x);
  if (p <= 0.0) return;
  for (double& s : x) s *= target / p;
}

// Raised-cosine attack/release envelope of `ramp` samples on each side.
inline double fade(std::size_t i, std::size_t n, std::size_t ramp) {
  if (ramp == 0) return 1.0;
  const auto edge = static_cast<double>(std::min(i, n - 1 - i));
  if (edge >= static_cast<double>(ramp)) return 1.0;
  return 0.5 - 0.5 * std::cos(std::numbers::pi * edge / static_cast<double>(ramp));
}

inline void tonal_background(std::vector<double>& x, int sr, Rng& rng) {
  const double f0 = uniform(rng, 110.0, 140.0);
  const double am_rate = uniform(rng, 0.2, 0.5);
  const double am_phase = uniform(rng, 0.0, 2 * std::numbers::pi);
  double phases[6];
  for (double& p : phases) p = uniform(rng, 0.0, 2 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, 1.0);
  double lp = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / sr;
    double v = 0.0;
    for (int h = 0; h < 6; ++h)
      v += std::sin(2 * std::numbers::pi * f0 * (h + 1) * t + phases[h]) / (h + 1);
    v *= 1.0 + 0.2 * std::sin(2 * std::numbers::pi * am_rate * t + am_phase);
    lp = 0.9 * lp + 0.1 * noise(rng);
    x[i] = v + 0.3 * lp + 0.02 * noise(rng);
  }
}

inline void noise_background(std::vector<double>& x, int sr, Rng& rng) {
  const double pole = uniform(rng, 0.85, 0.95);
  const double am_rate = uniform(rng, 0.2, 0.5);
  const double am_phase = uniform(rng, 0.0, 2 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, 1.0);
  double lp = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / sr;
    lp = pole * lp + (1.0 - pole) * noise(rng);
    const double am = 1.0 + 0.2 * std::sin(2 * std::numbers::pi * am_rate * t + am_phase);
    x[i] = am * (lp + 0.05 * noise(rng));
  }
}

inline void chirp(std::vector<double>& x, int sr, Rng& rng) {
  const double f_start = uniform(rng, 400.0, 800.0);
  const double f_end = uniform(rng, 2000.0, 4000.0);
  const double trem = uniform(rng, 3.0, 6.0);
  const double dur = static_cast<double>(x.size()) / sr;
  const auto ramp = static_cast<std::size_t>(0.02 * sr);
  double phase = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / sr;
    // Exponential sweep.
    const double f = f_start * std::pow(f_end / f_start, t / dur);
    phase += 2 * std::numbers::pi * f / sr;
    const double env = 0.55 + 0.45 * std::sin(2 * std::numbers::pi * trem * t);
    x[i] = env * fade(i, x.size(), ramp) * (std::sin(phase) + 0.3 * std::sin(2 * phase));
  }
}

inline void clicks(std::vector<double>& x, int sr, Rng& rng) {
  std::fill(x.begin(), x.end(), 0.0);
  const int count = std::uniform_int_distribution<int>(3, 6)(rng);
  const double tau = 0.001 * sr;
  const auto len = static_cast<std::size_t>(8 * tau);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int k = 0; k < count; ++k) {
    const double ring = uniform(rng, 2000.0, 4000.0);
    const auto start = std::uniform_int_distribution<std::size_t>(
        0, x.size() > len ? x.size() - len : 0)(rng);
    const double gain = uniform(rng, 0.6, 1.0);
    for (std::size_t j = 0; j < len && start + j < x.size(); ++j) {
      const double t = static_cast<double>(j);
      const double carrier = 0.7 * std::sin(2 * std::numbers::pi * ring * t / sr) + 0.3 * noise(rng);
      x[start + j] += gain * std::exp(-t / tau) * carrier;
    }
  }
}

inline void tone_bursts(std::vector<double>& x, int sr, Rng& rng) {
  std::fill(x.begin(), x.end(), 0.0);
  const double f = uniform(rng, 1000.0, 3000.0);
  const int count = std::uniform_int_distribution<int>(2, 4)(rng);
  const std::size_t slot = x.size() / static_cast<std::size_t>(count);
  for (int k = 0; k < count; ++k) {
    const auto len = std::min(slot, static_cast<std::size_t>(uniform(rng, 0.05, 0.15) * sr));
    const std::size_t start = static_cast<std::size_t>(k) * slot +
        std::uniform_int_distribution<std::size_t>(0, slot - len)(rng);
    const double gain = uniform(rng, 0.5, 1.0);
    const auto ramp = static_cast<std::size_t>(0.005 * sr);
    for (std::size_t j = 0; j < len; ++j) {
      const double t = static_cast<double>(j) / sr;
      const double v = std::sin(2 * std::numbers::pi * f * t) +
                       0.5 * std::sin(2 * std::numbers::pi * 2 * f * t);
      x[start + j] += gain * fade(j, len, ramp) * v;
    }
  }
}

}  // namespace detail

// Deterministic for fixed (kind, duration_s, seed, sample_rate). Output peak
// is normalized to kSynthPeak.
inline Waveform synth_clip(ClipKind kind, double duration_s, std::uint64_t seed,
                           int sample_rate = 16000) {
  require(duration_s > 0.0 && std::isfinite(duration_s), Errc::parameter,
          "duration must be positive");
  require(sample_rate > 0, Errc::parameter, "sample rate must be positive");
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  require(n > 0, Errc::parameter, "duration shorter than one sample");

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(kind)};
  detail::Rng rng(seq);

  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.assign(n, 0.0);
  switch (kind) {
    case ClipKind::tonal_background: detail::tonal_background(w.samples, sample_rate, rng); break;
    case ClipKind::noise_background: detail::noise_background(w.samples, sample_rate, rng); break;
    case ClipKind::chirp_anomaly: detail::chirp(w.samples, sample_rate, rng); break;
    case ClipKind::click_anomaly: detail::clicks(w.samples, sample_rate, rng); break;
    case ClipKind::tone_burst_anomaly: detail::tone_bursts(w.samples, sample_rate, rng); break;
  }
  detail::normalize_peak(w.samples, kSynthPeak);
  return w;
}

}  // namespace aad::audio
