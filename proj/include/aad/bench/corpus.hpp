#pragma once

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "aad/audio/mix.hpp"
#include "aad/audio/spectrogram.hpp"
#include "aad/audio/synth.hpp"
#include "aad/audio/wav_io.hpp"
#include "aad/bench/manifest.hpp"
#include "aad/core/image_io.hpp"
#include "aad/core/parallel.hpp"
#include "aad/metrics/localization.hpp"
#include "aad/metrics/temporal.hpp"

namespace aad::bench {

struct CorpusConfig {
  std::size_t n_train = 40;
  std::size_t n_test_normal = 20;
  std::size_t n_test_anomalous = 20;  // per SNR level
  double duration_s = 4.0;
  double anomaly_min_s = 0.5;
  double anomaly_max_s = 1.0;
  std::vector<double> snr_levels{6.0, 0.0, -6.0};
  int sample_rate = 16000;
  audio::SpectrogramParams spectrogram;
  double gt_top_fraction = metrics::kGroundTruthTopFraction;
  double temporal_percentile = metrics::kTemporalPercentile;

  void validate() const {
    require(n_train > 0, Errc::config, "corpus needs at least one training clip");
    require(!snr_levels.empty(), Errc::config, "at least one SNR level is required");
    require(duration_s > 0.0 && anomaly_min_s > 0.0 && anomaly_min_s <= anomaly_max_s &&
                anomaly_max_s <= duration_s,
            Errc::config, "need 0 < anomaly_min_s <= anomaly_max_s <= duration_s");
    spectrogram.validate(sample_rate);
  }

  friend bool operator==(const CorpusConfig&, const CorpusConfig&) = default;
};

inline void to_json(nlohmann::json& j, const CorpusConfig& c) {
  j = {{"n_train", c.n_train},
       {"n_test_normal", c.n_test_normal},
       {"n_test_anomalous", c.n_test_anomalous},
       {"duration_s", c.duration_s},
       {"anomaly_min_s", c.anomaly_min_s},
       {"anomaly_max_s", c.anomaly_max_s},
       {"snr_levels", c.snr_levels},
       {"sample_rate", c.sample_rate},
       {"spectrogram", c.spectrogram},
       {"gt_top_fraction", c.gt_top_fraction},
       {"temporal_percentile", c.temporal_percentile}};
}

inline void from_json(const nlohmann::json& j, CorpusConfig& c) {
  CorpusConfig d;
  c.n_train = j.value("n_train", d.n_train);
  c.n_test_normal = j.value("n_test_normal", d.n_test_normal);
  c.n_test_anomalous = j.value("n_test_anomalous", d.n_test_anomalous);
  c.duration_s = j.value("duration_s", d.duration_s);
  c.anomaly_min_s = j.value("anomaly_min_s", d.anomaly_min_s);
  c.anomaly_max_s = j.value("anomaly_max_s", d.anomaly_max_s);
  c.snr_levels = j.value("snr_levels", d.snr_levels);
  c.sample_rate = j.value("sample_rate", d.sample_rate);
  c.spectrogram = j.value("spectrogram", d.spectrogram);
  c.gt_top_fraction = j.value("gt_top_fraction", d.gt_top_fraction);
  c.temporal_percentile = j.value("temporal_percentile", d.temporal_percentile);
}

// Independent stream for (seed, role, index, attempt).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t role, std::size_t index,
                                 std::uint32_t attempt = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), role,
                    static_cast<std::uint32_t>(index), attempt};
  std::mt19937_64 rng(seq);
  return rng();
}

inline std::string snr_label(double snr) {
  char buf[32];
  if (snr == std::round(snr))
    std::snprintf(buf, sizeof buf, snr == 0.0 ? "snr_0" : "snr_%+d", static_cast<int>(snr));
  else
    std::snprintf(buf, sizeof buf, "snr_%+.2f", snr);
  return buf;
}

inline std::string indexed(std::string_view prefix, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return std::string(prefix) + buf;
}

inline constexpr std::uint32_t kMaxRegenerations = 5;

namespace detail {

enum Role : std::uint32_t { train_bg = 1, test_bg = 2, anom_bg = 3, anom_src = 4, placement = 5 };

inline audio::ClipKind background_kind(std::size_t i) {
  return i % 2 == 0 ? audio::ClipKind::tonal_background : audio::ClipKind::noise_background;
}

inline audio::ClipKind anomaly_kind(std::size_t i) {
  static constexpr audio::ClipKind kinds[] = {audio::ClipKind::chirp_anomaly, audio::ClipKind::click_anomaly,
                                              audio::ClipKind::tone_burst_anomaly};
  return kinds[i % 3];
}

struct AnomalousSlot {
  std::vector<ClipEntry> per_snr;
  std::uint32_t attempts = 0;
};

}  // namespace detail

// Writes the corpus under `dir` and returns its manifest (also written to
// dir/manifest.json). Anomalous clip j uses the same background, anomaly and
// placement at every SNR level, so levels differ only in the mixing gain.
// `regenerated` receives one line per degenerate mix that was redrawn.
inline DatasetManifest build_corpus(const CorpusConfig& cfg, std::uint64_t seed,
                                    const std::filesystem::path& dir, std::size_t jobs = 1,
                                    std::vector<std::string>* regenerated = nullptr) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(Errc::io, "cannot create directory " + dir.string() + ": " + ec.message());

  const auto& sp = cfg.spectrogram;
  auto normal_clip = [&](std::uint32_t role, std::size_t i, Split split, const std::string& id) {
    const auto w = audio::synth_clip(detail::background_kind(i), cfg.duration_s, derive_seed(seed, role, i),
                                     cfg.sample_rate);
    ClipEntry e;
    e.clip_id = id;
    e.wav_path = (split == Split::train ? "train/" : "test/normal/") + id + ".wav";
    e.split = split;
    audio::write_wav(dir / e.wav_path, w);
    return e;
  };

  std::vector<ClipEntry> train(cfg.n_train), test_normal(cfg.n_test_normal);
  parallel_for(cfg.n_train, jobs,
               [&](std::size_t i) { train[i] = normal_clip(detail::train_bg, i, Split::train, indexed("train_", i)); });
  parallel_for(cfg.n_test_normal, jobs, [&](std::size_t i) {
    test_normal[i] = normal_clip(detail::test_bg, i, Split::test, indexed("normal_", i));
  });

  std::vector<detail::AnomalousSlot> anomalous(cfg.n_test_anomalous);
  parallel_for(cfg.n_test_anomalous, jobs, [&](std::size_t j) {
    auto& slot = anomalous[j];
    for (std::uint32_t attempt = 0;; ++attempt) {
      slot.attempts = attempt;
      const auto bg = audio::synth_clip(detail::background_kind(j), cfg.duration_s,
                                        derive_seed(seed, detail::anom_bg, j, attempt), cfg.sample_rate);
      std::mt19937_64 place(derive_seed(seed, detail::placement, j, attempt));
      const double len_s = std::uniform_real_distribution<double>(cfg.anomaly_min_s, cfg.anomaly_max_s)(place);
      const auto an = audio::synth_clip(detail::anomaly_kind(j), len_s,
                                        derive_seed(seed, detail::anom_src, j, attempt), cfg.sample_rate);
      const std::size_t max_start = bg.size() - std::min(bg.size(), an.size());
      const std::size_t start = std::uniform_int_distribution<std::size_t>(0, max_start)(place);
      try {
        slot.per_snr.clear();
        const std::string base = indexed("anom_", j);
        const std::string bg_path = "test/anomalous/" + base + "_background.wav";
        for (double snr : cfg.snr_levels) {
          auto mix = audio::mix_at_snr(bg, an, snr, start, std::string(audio::to_string(detail::anomaly_kind(j))));
          const std::string sub = "test/anomalous/" + snr_label(snr) + "/";
          ClipEntry e;
          e.clip_id = base + "_" + snr_label(snr);
          e.wav_path = sub + base + ".wav";
          e.split = Split::test;
          e.label = Label::anomalous;
          e.background_wav_path = bg_path;
          e.gt_mask_path = sub + base + "_gt.pgm";
          mix.record.anomaly_spec_ref = sub + base + "_anomaly.afm";

          const auto iso = audio::log_mel_spectrogram(audio::isolated_anomaly(an, mix.record, bg.size()), sp);
          const std::size_t frames = iso.values.rows();
          const auto [f0, f1] = audio::frames_overlapping(mix.record.t_start_sample, mix.record.t_end_sample, sp, frames);
          const auto gt = metrics::spect_ground_truth(iso.values, {f0, f1, 0, iso.values.cols()}, cfg.gt_top_fraction);
          const auto tgt = metrics::temporal_ground_truth(iso.values, f0, f1, cfg.temporal_percentile);
          e.temporal_gt.reserve(frames);
          for (auto v : tgt) e.temporal_gt.push_back(v ? '1' : '0');

          audio::write_wav(dir / e.wav_path, mix.mixed);
          write_matrix(dir / mix.record.anomaly_spec_ref, iso.values);
          Matrix<std::uint8_t> img = gt.values;
          for (auto& v : img.data()) v = v ? 255 : 0;
          write_pgm(dir / e.gt_mask_path, to_image_layout(img));
          e.injection = std::move(mix.record);
          slot.per_snr.push_back(std::move(e));
        }
        audio::write_wav(dir / bg_path, bg);
        return;
      } catch (const Error& err) {
        if (err.code() != Errc::degenerate_signal) throw;
        if (attempt + 1 > kMaxRegenerations)
          fail(Errc::degenerate_signal, "anomalous clip " + std::to_string(j) + " still degenerate after " +
                                            std::to_string(kMaxRegenerations) + " regenerations: " + err.what());
      }
    }
  });

  std::vector<ClipEntry> clips;
  for (auto& c : train) clips.push_back(std::move(c));
  for (auto& c : test_normal) clips.push_back(std::move(c));
  for (std::size_t s = 0; s < cfg.snr_levels.size(); ++s)
    for (std::size_t j = 0; j < anomalous.size(); ++j) clips.push_back(anomalous[j].per_snr[s]);
  if (regenerated)
    for (std::size_t j = 0; j < anomalous.size(); ++j)
      if (anomalous[j].attempts > 0)
        regenerated->push_back(indexed("anom_", j) + " regenerated " + std::to_string(anomalous[j].attempts) +
                               " time(s) after a degenerate mix");

  ManifestHeader h;
  h.seed = seed;
  h.sample_rate = cfg.sample_rate;
  h.spectrogram = sp;
  DatasetManifest m(h, std::move(clips));
  write_manifest(dir / "manifest.json", m);
  return m;
}

}  // namespace aad::bench
