#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "aad/audio/mix.hpp"
#include "aad/audio/spectrogram.hpp"
#include "aad/audio/synth.hpp"
#include "aad/audio/wav_io.hpp"
#include "oracles.hpp"

using namespace aad;
using namespace aad::audio;

namespace {

Waveform sine(double freq, double amp, std::size_t n, int sr = 16000) {
  Waveform w;
  w.sample_rate = sr;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) w.samples[i] = amp * std::sin(2 * std::numbers::pi * freq * i / sr);
  return w;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected aad::Error";
  return Errc::io;
}

}  // namespace

TEST(Synth, DeterministicForFixedSeed) {
  const auto a = synth_clip(ClipKind::tonal_background, 1.0, 7);
  const auto b = synth_clip(ClipKind::tonal_background, 1.0, 7);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.size(), 16000u);
  EXPECT_NE(a.samples, synth_clip(ClipKind::tonal_background, 1.0, 8).samples);
}

TEST(Synth, PeakBoundedForEveryKind) {
  for (auto k : {ClipKind::tonal_background, ClipKind::noise_background, ClipKind::chirp_anomaly,
                 ClipKind::click_anomaly, ClipKind::tone_burst_anomaly}) {
    const auto w = synth_clip(k, 0.75, 3);
    EXPECT_LE(peak(w.samples), 0.9) << to_string(k);
    EXPECT_GT(peak(w.samples), 0.0) << to_string(k);
  }
}

TEST(Synth, ClickEnergyIsConcentrated) {
  const auto w = synth_clip(ClipKind::click_anomaly, 0.5, 1);
  const double p = peak(w.samples);
  std::size_t above = 0;
  for (double s : w.samples) above += std::abs(s) > 0.1 * p;
  EXPECT_GT(above, 0u);
  EXPECT_LT(static_cast<double>(above), 0.2 * static_cast<double>(w.size()));
}

TEST(Synth, NonPositiveDurationIsParameterError) {
  EXPECT_EQ(code_of([] { synth_clip(ClipKind::noise_background, -1.0, 3); }), Errc::parameter);
  EXPECT_EQ(code_of([] { synth_clip(ClipKind::noise_background, 0.0, 3); }), Errc::parameter);
}

TEST(Mix, EqualPowerAtZeroDbKeepsScale) {
  const auto bg = sine(440, 0.3, 8000);
  const auto an = sine(1000, 0.3, 4000);
  const auto r = mix_at_snr(bg, an, 0.0, 0);
  // Both windows hold whole numbers of periods, so powers match to rounding.
  EXPECT_NEAR(r.record.scale_alpha, 1.0, 1e-9);
}

TEST(Mix, SixDbScalesByAmplitudeRatio) {
  const auto bg = sine(440, 0.1, 8000);
  const auto an = sine(1000, 0.1, 4000);
  const auto r = mix_at_snr(bg, an, 6.0, 2000);
  // Oracle: alpha = 10^((target - current)/20) with current measured directly.
  const double current = 10 * std::log10(mean_power(an.samples, 0, 4000) / mean_power(bg.samples, 2000, 6000));
  EXPECT_NEAR(r.record.scale_alpha, std::pow(10.0, (6.0 - current) / 20.0), 1e-12);
  EXPECT_NEAR(r.record.scale_alpha, 1.9953, 2e-3);
  EXPECT_EQ(r.record.t_start_sample, 2000u);
  EXPECT_EQ(r.record.t_end_sample, 6000u);
  EXPECT_EQ(r.record.clip_count, 0u);
}

TEST(Mix, ZeroAnomalyIsDegenerate) {
  const auto bg = sine(440, 0.3, 8000);
  Waveform zero{std::vector<double>(1000, 0.0), 16000};
  EXPECT_EQ(code_of([&] { mix_at_snr(bg, zero, 0.0, 0); }), Errc::degenerate_signal);
  Waveform silent_bg{std::vector<double>(8000, 0.0), 16000};
  EXPECT_EQ(code_of([&] { mix_at_snr(silent_bg, bg, 0.0, 0); }), Errc::degenerate_signal);
}

TEST(Mix, AnomalyPastEndIsBoundsError) {
  const auto bg = sine(440, 0.3, 8000);
  const auto an = sine(1000, 0.3, 4000);
  EXPECT_EQ(code_of([&] { mix_at_snr(bg, an, 0.0, 4001); }), Errc::bounds);
  EXPECT_NO_THROW(mix_at_snr(bg, an, 0.0, 4000));
}

TEST(Mix, SampleRateMismatchIsParameterError) {
  const auto bg = sine(440, 0.3, 8000);
  const auto an = sine(1000, 0.3, 4000, 8000);
  EXPECT_EQ(code_of([&] { mix_at_snr(bg, an, 0.0, 0); }), Errc::parameter);
}

TEST(Mix, ClippingIsCountedNotRenormalized) {
  const auto bg = sine(440, 0.8, 4000);
  const auto an = sine(300, 0.8, 4000);
  const auto r = mix_at_snr(bg, an, 6.0, 0);
  EXPECT_GT(r.record.clip_count, 0u);
  EXPECT_LE(peak(r.mixed.samples), 1.0);
  EXPECT_EQ(r.mixed.samples[0], bg.samples[0] + r.record.scale_alpha * an.samples[0]);
}

TEST(Mix, SnrRoundTripProperty) {
  std::mt19937_64 rng(11);
  const ClipKind bgs[] = {ClipKind::tonal_background, ClipKind::noise_background};
  const ClipKind ans[] = {ClipKind::chirp_anomaly, ClipKind::click_anomaly, ClipKind::tone_burst_anomaly};
  for (int i = 0; i < 20; ++i) {
    auto bg = synth_clip(bgs[i % 2], 1.0, rng());
    auto an = synth_clip(ans[i % 3], 0.3, rng());
    for (double& s : bg.samples) s *= 0.2;
    for (double& s : an.samples) s *= 0.2;
    for (double target : {-6.0, 0.0, 6.0}) {
      const std::size_t start = rng() % (bg.size() - an.size());
      const auto r = mix_at_snr(bg, an, target, start);
      // Measured before clipping: the isolated scaled anomaly vs the background.
      const auto scaled = isolated_anomaly(an, r.record, bg.size());
      const double measured = 10 * std::log10(mean_power(scaled.samples, start, start + an.size()) /
                                              mean_power(bg.samples, start, start + an.size()));
      EXPECT_NEAR(measured, target, 0.05);
    }
  }
}

TEST(Spectrogram, SilenceIsLogOffsetFloor) {
  Waveform w{std::vector<double>(4096, 0.0), 16000};
  const auto s = log_mel_spectrogram(w);
  for (double v : s.values.data()) EXPECT_EQ(v, std::log(1e-6));
}

TEST(Spectrogram, ExactlyOneFrame) {
  const auto s = log_mel_spectrogram(sine(440, 0.5, 1024));
  EXPECT_EQ(s.frames(), 1u);
  EXPECT_EQ(s.bands(), 64u);
}

TEST(Spectrogram, ShortClipIsLengthError) {
  EXPECT_EQ(code_of([] { log_mel_spectrogram(sine(440, 0.5, 1023)); }), Errc::length);
}

TEST(Spectrogram, InvalidParamsRejected) {
  SpectrogramParams p;
  p.hop = 2048;
  EXPECT_EQ(code_of([&] { log_mel_spectrogram(sine(440, 0.5, 4096), p); }), Errc::parameter);
  p = {};
  p.fmax = 9000;
  EXPECT_EQ(code_of([&] { log_mel_spectrogram(sine(440, 0.5, 4096), p); }), Errc::parameter);
}

TEST(Spectrogram, SineAtBandCenterPeaksInThatBand) {
  const SpectrogramParams p;
  const auto centers = mel_band_centers(p);
  for (std::size_t k : {8u, 20u, 33u, 47u, 60u}) {
    const auto w = sine(centers[k], 0.5, 4096);
    const auto s = log_mel_spectrogram(w, p);
    // Oracle: direct DFT of the first frame.
    std::vector<double> frame(w.samples.begin(), w.samples.begin() + 1024);
    const auto e = oracle::direct_mel_energies(frame, 16000, 64, p.fmin, p.fmax);
    ASSERT_EQ(static_cast<std::size_t>(std::max_element(e.begin(), e.end()) - e.begin()), k);
    EXPECT_NEAR(s.values(0, k), std::log(e[k] + 1e-6), 1e-9);
    for (std::size_t t = 0; t < s.frames(); ++t) {
      const auto row = s.values.row(t);
      EXPECT_EQ(static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin()), k);
    }
  }
}

TEST(Spectrogram, NonPowerOfTwoFftMatchesOracle) {
  SpectrogramParams p;
  p.n_fft = 600;
  p.hop = 300;
  const auto w = sine(1234.5, 0.4, 1200);
  const auto s = log_mel_spectrogram(w, p);
  std::vector<double> frame(w.samples.begin(), w.samples.begin() + 600);
  const auto e = oracle::direct_mel_energies(frame, 16000, 64, p.fmin, p.fmax);
  for (std::size_t k = 0; k < 64; ++k) EXPECT_NEAR(s.values(0, k), std::log(e[k] + 1e-6), 1e-7);
}

TEST(Spectrogram, FramingMatchesClosedForm) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const int n_fft = 64 << (rng() % 4);
    const int hop = 1 + static_cast<int>(rng() % n_fft);
    const std::size_t len = n_fft + rng() % 3000;
    SpectrogramParams p;
    p.n_fft = n_fft;
    p.hop = hop;
    p.n_mels = 8;
    const auto s = log_mel_spectrogram(sine(500, 0.1, len), p);
    EXPECT_EQ(s.frames(), 1 + (len - n_fft) / hop);
  }
}

TEST(Spectrogram, ScalingUpNeverDecreasesCells) {
  const auto w = synth_clip(ClipKind::noise_background, 0.5, 9);
  auto louder = w;
  for (double& s : louder.samples) s *= 1.7;
  const auto a = log_mel_spectrogram(w), b = log_mel_spectrogram(louder);
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_GE(b.values.data()[i], a.values.data()[i]);
}

TEST(Spectrogram, FramesOverlappingInterval) {
  using Span = std::pair<std::size_t, std::size_t>;
  SpectrogramParams p;  // n_fft 1024, hop 512
  EXPECT_EQ(frames_overlapping(0, 1, p, 100), (Span{0, 1}));
  // Samples [1024, 1536) touch frames 1 (512..1536) and 2 (1024..2048).
  EXPECT_EQ(frames_overlapping(1024, 1536, p, 100), (Span{1, 3}));
  EXPECT_EQ(frames_overlapping(1024, 1536, p, 2), (Span{1, 2}));
}

TEST(WavIo, QuantizedRoundTripIsLossless) {
  const auto w = quantize_pcm16(synth_clip(ClipKind::chirp_anomaly, 0.25, 4));
  const auto back = decode_wav(encode_wav(w));
  EXPECT_EQ(back.sample_rate, 16000);
  EXPECT_EQ(back.samples, w.samples);
}

TEST(WavIo, RejectsGarbage) {
  std::vector<std::uint8_t> junk{'R', 'I', 'F', 'X', 0, 0, 0, 0};
  EXPECT_THROW(decode_wav(junk), FormatError);
  auto bytes = encode_wav(sine(440, 0.2, 100));
  bytes.resize(50);
  EXPECT_THROW(decode_wav(bytes), FormatError);
}
