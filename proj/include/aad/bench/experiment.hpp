#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aad/bench/corpus.hpp"
#include "aad/bench/manifest.hpp"
#include "aad/core/image_io.hpp"
#include "aad/core/parallel.hpp"
#include "aad/detectors/config_json.hpp"
#include "aad/detectors/model_io.hpp"
#include "aad/metrics/classification.hpp"
#include "aad/metrics/faithfulness.hpp"
#include "aad/metrics/localization.hpp"
#include "aad/metrics/report.hpp"
#include "aad/metrics/temporal.hpp"

namespace aad::bench {

struct MetricConfig {
  double prediction_percentile = metrics::kPredictionPercentile;
  double pro_fpr_limit = metrics::kDefaultProFprLimit;
  std::size_t temporal_top_k = metrics::kTemporalTopK;
  bool faithfulness = true;

  friend bool operator==(const MetricConfig&, const MetricConfig&) = default;
};

inline void to_json(nlohmann::json& j, const MetricConfig& c) {
  j = {{"prediction_percentile", c.prediction_percentile},
       {"pro_fpr_limit", c.pro_fpr_limit},
       {"temporal_top_k", c.temporal_top_k},
       {"faithfulness", c.faithfulness}};
}

inline void from_json(const nlohmann::json& j, MetricConfig& c) {
  MetricConfig d;
  c.prediction_percentile = j.value("prediction_percentile", d.prediction_percentile);
  c.pro_fpr_limit = j.value("pro_fpr_limit", d.pro_fpr_limit);
  c.temporal_top_k = j.value("temporal_top_k", d.temporal_top_k);
  c.faithfulness = j.value("faithfulness", d.faithfulness);
}

inline std::vector<detectors::DetectorConfig> default_detectors() {
  std::vector<detectors::DetectorConfig> out(3);
  out[0].kind = detectors::DetectorKind::padim;
  out[1].kind = detectors::DetectorKind::patchcore;
  out[2].kind = detectors::DetectorKind::stfpm;
  return out;
}

struct ExperimentConfig {
  std::uint64_t seed = 7;
  CorpusConfig corpus;
  detectors::PipelineConfig pipeline;  // spectrogram/sample rate follow the corpus
  std::vector<detectors::DetectorConfig> detectors = default_detectors();
  MetricConfig metrics;
  bool persist_maps = true;

  void validate() const {
    corpus.validate();
    require(!detectors.empty(), Errc::config, "no detectors configured");
    pipeline.extractor.validate();
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  nlohmann::json pipeline = c.pipeline;
  pipeline.erase("spectrogram");
  pipeline.erase("sample_rate");
  j = {{"seed", c.seed},       {"corpus", c.corpus},   {"pipeline", pipeline},
       {"detectors", c.detectors}, {"metrics", c.metrics}, {"persist_maps", c.persist_maps}};
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  ExperimentConfig d;
  c.seed = j.value("seed", d.seed);
  c.corpus = j.value("corpus", d.corpus);
  c.pipeline = j.value("pipeline", d.pipeline);
  c.pipeline.spectrogram = c.corpus.spectrogram;
  c.pipeline.sample_rate = c.corpus.sample_rate;
  c.detectors = j.value("detectors", d.detectors);
  c.metrics = j.value("metrics", d.metrics);
  c.persist_maps = j.value("persist_maps", d.persist_maps);
}

inline ExperimentConfig parse_experiment_config(std::string_view text, const std::string& path = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    auto c = j.get<ExperimentConfig>();
    c.validate();
    return c;
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("config is not valid JSON: ") + e.what(), e.byte, path);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::config, std::string("malformed config: ") + e.what());
  }
}

// ---- corpus loaded into memory

struct TestClip {
  const ClipEntry* entry = nullptr;
  Matrix<double> spec;
  Matrix<std::uint8_t> gt;            // T x F, anomalous clips only
  std::vector<std::uint8_t> temporal_gt;
  Matrix<double> background;          // T x F spectrogram of the unmixed background
  bool anomalous() const { return entry->label == Label::anomalous; }
  double snr() const { return entry->injection ? entry->injection->snr_db : std::nan(""); }
};

struct LoadedCorpus {
  DatasetManifest manifest;
  std::filesystem::path root;
  std::vector<Matrix<double>> train;
  std::vector<TestClip> test;
};

inline Matrix<double> spectrogram_of(const std::filesystem::path& wav, const ManifestHeader& h) {
  const auto w = audio::read_wav(wav);
  require(w.sample_rate == h.sample_rate, Errc::data,
          wav.string() + ": sample rate " + std::to_string(w.sample_rate) + " does not match the manifest");
  return audio::log_mel_spectrogram(w, h.spectrogram).values;
}

inline LoadedCorpus load_corpus(const DatasetManifest& m, const std::filesystem::path& root, std::size_t jobs = 1) {
  LoadedCorpus c{m, root, {}, {}};
  const auto train = c.manifest.select(Split::train);
  const auto test = c.manifest.select(Split::test);
  c.train.resize(train.size());
  c.test.resize(test.size());
  const auto& h = c.manifest.header();
  parallel_for(train.size(), jobs, [&](std::size_t i) { c.train[i] = spectrogram_of(root / train[i]->wav_path, h); });
  parallel_for(test.size(), jobs, [&](std::size_t i) {
    auto& t = c.test[i];
    t.entry = test[i];
    t.spec = spectrogram_of(root / t.entry->wav_path, h);
    if (!t.anomalous()) return;
    auto gt = from_image_layout(read_pgm(root / t.entry->gt_mask_path));
    require(gt.rows() == t.spec.rows() && gt.cols() == t.spec.cols(), Errc::shape,
            t.entry->gt_mask_path + ": mask shape does not match the clip's spectrogram");
    for (auto& v : gt.data()) v = v ? 1 : 0;
    t.gt = std::move(gt);
    require(t.entry->temporal_gt.size() == t.spec.rows(), Errc::shape,
            t.entry->clip_id + ": temporal ground truth length does not match the frame count");
    for (char ch : t.entry->temporal_gt) t.temporal_gt.push_back(ch == '1' ? 1 : 0);
    if (!t.entry->background_wav_path.empty())
      t.background = spectrogram_of(root / t.entry->background_wav_path, h);
  });
  return c;
}

// ---- metrics from maps

// Sample-level score of a stored (float32) map.
inline double map_score(const Matrix<double>& map, const detectors::PipelineConfig& p) {
  detectors::AnomalyMap m;
  m.values = map;
  return detectors::sample_score(m, p.reduction, p.top_k);
}

inline Matrix<double> normalized(const Matrix<double>& map) {
  detectors::AnomalyMap m;
  m.values = map;
  return detectors::normalize_minmax(std::move(m)).values;
}

// Runs `fn`, returning NaN (and recording why) when the metric is undefined.
template <typename Fn>
double guarded(Fn&& fn, std::map<std::string, std::string>& notes, const std::string& key) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() != Errc::metric_undefined) throw;
    notes[key] = e.what();
    return std::nan("");
  }
}

inline std::string snr_key(double snr) { return snr_label(snr).substr(4); }

// One row per SNR level. `maps` holds one raw (unnormalized) T x F map per
// test clip, aligned with corpus.test. `scorer` enables faithfulness.
inline std::vector<metrics::MetricsRow> evaluate_maps(const std::string& method, const LoadedCorpus& corpus,
                                                      const std::vector<Matrix<double>>& maps,
                                                      const detectors::PipelineConfig& pipeline,
                                                      const MetricConfig& mc,
                                                      const metrics::SpectrogramScorer& scorer,
                                                      std::map<std::string, std::string>& notes,
                                                      std::size_t jobs = 1) {
  require(maps.size() == corpus.test.size(), Errc::shape, "one map per test clip is required");
  std::vector<double> scores(maps.size());
  for (std::size_t i = 0; i < maps.size(); ++i) {
    require(maps[i].rows() == corpus.test[i].spec.rows() && maps[i].cols() == corpus.test[i].spec.cols(),
            Errc::shape, corpus.test[i].entry->clip_id + ": map shape does not match the spectrogram");
    scores[i] = map_score(maps[i], pipeline);
  }

  std::vector<metrics::MetricsRow> rows;
  for (double snr : corpus.manifest.snr_levels()) {
    metrics::MetricsRow row;
    row.method = method;
    row.snr_db = snr;
    const std::string key = method + "." + snr_key(snr);

    std::vector<double> s;
    std::vector<std::uint8_t> y;
    std::vector<std::size_t> anomalous;
    for (std::size_t i = 0; i < maps.size(); ++i) {
      const auto& t = corpus.test[i];
      if (t.anomalous() && t.snr() != snr) continue;
      s.push_back(scores[i]);
      y.push_back(t.anomalous() ? 1 : 0);
      if (t.anomalous()) anomalous.push_back(i);
    }
    row.sample_roc = guarded([&] { return metrics::roc_auc(s, y); }, notes, key + ".sample");
    row.sample_f1 = guarded([&] { return metrics::best_f1(s, y).f1; }, notes, key + ".sample");

    std::vector<Matrix<double>> amaps;
    std::vector<metrics::BinaryMask> gts;
    std::vector<double> ts;
    std::vector<std::uint8_t> ty;
    for (auto i : anomalous) {
      amaps.push_back(maps[i]);
      gts.push_back({corpus.test[i].gt, metrics::MaskRole::ground_truth});
      const auto col = metrics::temporal_scores(normalized(maps[i]), mc.temporal_top_k);
      ts.insert(ts.end(), col.begin(), col.end());
      ty.insert(ty.end(), corpus.test[i].temporal_gt.begin(), corpus.test[i].temporal_gt.end());
    }
    if (!amaps.empty()) {
      const auto sl = guarded(
          [&] {
            const auto r = metrics::spect_level_metrics(amaps, gts, mc.pro_fpr_limit, mc.prediction_percentile);
            row.spect_f1 = r.f1;
            row.spect_pro = r.pro;
            return r.roc;
          },
          notes, key + ".spect");
      row.spect_roc = sl;
      row.temp_roc = guarded([&] { return metrics::roc_auc(ts, ty); }, notes, key + ".temporal");
      row.temp_f1 = guarded([&] { return metrics::best_f1(ts, ty).f1; }, notes, key + ".temporal");
    }

    if (mc.faithfulness && scorer && !anomalous.empty()) {
      std::vector<double> v1(anomalous.size()), v2(anomalous.size());
      parallel_for(anomalous.size(), jobs, [&](std::size_t k) {
        const auto& t = corpus.test[anomalous[k]];
        require(!t.background.empty(), Errc::data, t.entry->clip_id + ": no background recorded for FF v2");
        const auto r = metrics::faithfulness(scorer, t.spec, normalized(maps[anomalous[k]]), t.background,
                                             scores[anomalous[k]]);
        v1[k] = r.ff_v1;
        v2[k] = r.ff_v2;
      });
      const auto a = metrics::mean_std(v1), b = metrics::mean_std(v2);
      row.ff_v1_mean = a.mean;
      row.ff_v1_std = a.std;
      row.ff_v2_mean = b.mean;
      row.ff_v2_std = b.std;
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::map<std::string, std::string> convention_notes() {
  return {
      {"convention.e_t", "sum over bands of the isolated anomaly log-mel spectrogram (no second log)"},
      {"convention.spect_prediction", "per-map min-max normalization, then cells > p40"},
      {"convention.spect_roc_pro", "raw smoothed map values pooled over anomalous clips of the SNR level"},
      {"convention.temporal_scores", "top-5 mean per frame of the min-max normalized map"},
      {"convention.sample_set", "all normal test clips plus the anomalous clips of the SNR level"},
      {"convention.f1", "best F1 over all thresholds (score >= threshold)"},
      {"convention.ff", "spectrogram-domain masking with the normalized map; raw sample score; population std"},
  };
}

// ---- full experiment

struct ExperimentResult {
  metrics::MetricsReport report;
  std::map<std::string, std::uint32_t> model_crc;
  std::map<std::string, std::vector<Matrix<double>>> maps;  // per method, aligned with corpus.test
};

inline std::filesystem::path map_path(const std::filesystem::path& out, const std::string& method,
                                      const std::string& clip_id, std::string_view ext) {
  return out / "maps" / method / (clip_id + std::string(ext));
}

inline std::vector<Matrix<double>> read_maps(const std::filesystem::path& out, const std::string& method,
                                             const LoadedCorpus& corpus) {
  std::vector<Matrix<double>> maps;
  for (const auto& t : corpus.test) maps.push_back(read_matrix(map_path(out, method, t.entry->clip_id, ".afm")));
  return maps;
}

// Fits each configured detector on the train split, scores every test clip,
// persists models and maps under `out`, and computes all metric rows.
inline ExperimentResult run_experiment(const LoadedCorpus& corpus, const ExperimentConfig& cfg,
                                       const std::filesystem::path& out, std::size_t jobs = 1,
                                       std::ostream* log = nullptr) {
  cfg.validate();
  auto pipeline = cfg.pipeline;
  const auto& h = corpus.manifest.header();
  require(pipeline.spectrogram == h.spectrogram && pipeline.sample_rate == h.sample_rate, Errc::config,
          "pipeline spectrogram parameters differ from the manifest's");

  ExperimentResult res;
  res.report.notes = convention_notes();
  for (const auto& dc : cfg.detectors) {
    const std::string method(detectors::to_string(dc.kind));
    try {
      if (log) *log << "[" << method << "] fitting on " << corpus.train.size() << " clips\n" << std::flush;
      const auto fitted = detectors::Detector::fit(dc, pipeline, corpus.train);
      const auto bytes = detectors::encode_model(fitted);
      write_file(out / "models" / (method + ".avdm"), bytes);
      res.model_crc[method] = crc32(std::span(bytes).first(bytes.size() - 4));
      // Score with the persisted model so results match `fit` + `score`.
      const auto det = detectors::decode_model(bytes);

      if (log) *log << "[" << method << "] scoring " << corpus.test.size() << " clips\n" << std::flush;
      std::vector<Matrix<double>> maps(corpus.test.size());
      parallel_for(maps.size(), jobs, [&](std::size_t i) {
        maps[i] = round_to_f32(det.score(corpus.test[i].spec).map.values);
        if (cfg.persist_maps) {
          const auto& id = corpus.test[i].entry->clip_id;
          write_matrix(map_path(out, method, id, ".afm"), maps[i]);
          write_pgm(map_path(out, method, id, ".pgm"), to_image_layout(to_gray(maps[i])));
        }
      });
      const metrics::SpectrogramScorer scorer = [&](const Matrix<double>& x) {
        return map_score(round_to_f32(det.score(x).map.values), pipeline);
      };
      if (log) *log << "[" << method << "] metrics\n" << std::flush;
      auto rows = evaluate_maps(method, corpus, maps, pipeline, cfg.metrics, scorer, res.report.notes, jobs);
      res.report.rows.insert(res.report.rows.end(), rows.begin(), rows.end());
      res.maps[method] = std::move(maps);
    } catch (const std::exception& e) {
      res.report.notes["error." + method] = e.what();
      if (log) *log << "[" << method << "] failed: " << e.what() << "\n";
      for (double snr : corpus.manifest.snr_levels()) {
        metrics::MetricsRow row;
        row.method = method;
        row.snr_db = snr;
        res.report.rows.push_back(row);
      }
    }
  }
  return res;
}

}  // namespace aad::bench
