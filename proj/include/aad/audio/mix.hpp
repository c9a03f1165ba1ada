#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "aad/audio/waveform.hpp"

namespace aad::audio {

// Where and how an anomaly clip was mixed into a background clip.
struct InjectionRecord {
  std::string anomaly_id;
  std::size_t t_start_sample = 0;
  std::size_t t_end_sample = 0;  // exclusive
  double snr_db = 0.0;
  double scale_alpha = 1.0;
  std::string anomaly_spec_ref;
  std::size_t clip_count = 0;
};

struct MixResult {
  Waveform mixed;
  InjectionRecord record;
};

inline double snr_db(double p_signal, double p_background) {
  return 10.0 * std::log10(p_signal / p_background);
}

// Scales `anomaly` so that its mean power over the overlap window sits
// `target_snr_db` above the background's mean power over the same window,
// adds it in at `t_start_sample`, and hard-clips to [-1, 1].
inline MixResult mix_at_snr(const Waveform& background, const Waveform& anomaly,
                            double target_snr_db, std::size_t t_start_sample,
                            std::string anomaly_id = {}) {
  background.validate();
  anomaly.validate();
  require(background.sample_rate == anomaly.sample_rate, Errc::parameter,
          "sample rates differ (" + std::to_string(background.sample_rate) + " vs " +
              std::to_string(anomaly.sample_rate) + ")");
  require(std::isfinite(target_snr_db), Errc::parameter, "SNR must be finite");
  require(t_start_sample < background.size() &&
              anomaly.size() <= background.size() - t_start_sample,
          Errc::bounds, "anomaly does not fit inside the background from the start sample");

  const std::size_t end = t_start_sample + anomaly.size();
  const double p_bg = mean_power(background.samples, t_start_sample, end);
  const double p_an = mean_power(anomaly.samples, 0, anomaly.size());
  require(p_bg > 0.0, Errc::degenerate_signal, "background has zero power over the overlap window");
  require(p_an > 0.0, Errc::degenerate_signal, "anomaly has zero power");

  const double alpha = std::sqrt(p_bg * std::pow(10.0, target_snr_db / 10.0) / p_an);

  MixResult out;
  out.mixed = background;
  std::size_t clipped = 0;
  for (std::size_t i = 0; i < anomaly.size(); ++i) {
    double& s = out.mixed.samples[t_start_sample + i];
    s += alpha * anomaly.samples[i];
    if (s > 1.0 || s < -1.0) {
      s = std::clamp(s, -1.0, 1.0);
      ++clipped;
    }
  }
  out.record.anomaly_id = std::move(anomaly_id);
  out.record.t_start_sample = t_start_sample;
  out.record.t_end_sample = end;
  out.record.snr_db = target_snr_db;
  out.record.scale_alpha = alpha;
  out.record.clip_count = clipped;
  return out;
}

// The scaled anomaly placed on a silent canvas of the background's length;
// its spectrogram is the "isolated anomaly" used for ground truth.
inline Waveform isolated_anomaly(const Waveform& anomaly, const InjectionRecord& rec,
                                 std::size_t total_length) {
  Waveform w;
  w.sample_rate = anomaly.sample_rate;
  w.samples.assign(total_length, 0.0);
  for (std::size_t i = 0; i < anomaly.size() && rec.t_start_sample + i < total_length; ++i)
    w.samples[rec.t_start_sample + i] = rec.scale_alpha * anomaly.samples[i];
  return w;
}

}  // namespace aad::audio
