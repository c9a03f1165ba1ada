#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aad/audio/spectrogram.hpp"
#include "aad/detectors/padim.hpp"
#include "aad/detectors/patchcore.hpp"
#include "aad/detectors/postprocess.hpp"
#include "aad/detectors/stfpm.hpp"
#include "aad/features/align.hpp"
#include "aad/features/reference_extractor.hpp"

namespace aad::detectors {

enum class DetectorKind : std::uint8_t { padim = 1, patchcore = 2, stfpm = 3 };

inline std::string_view to_string(DetectorKind k) {
  switch (k) {
    case DetectorKind::padim: return "padim";
    case DetectorKind::patchcore: return "patchcore";
    case DetectorKind::stfpm: return "stfpm";
  }
  return "unknown";
}

inline std::optional<DetectorKind> parse_detector(std::string_view s) {
  for (auto k : {DetectorKind::padim, DetectorKind::patchcore, DetectorKind::stfpm})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

// Everything between a spectrogram and a T x F heatmap that is not the
// detector itself.
struct PipelineConfig {
  int sample_rate = 16000;
  audio::SpectrogramParams spectrogram;
  features::ExtractorSpec extractor;
  double smoothing_sigma = kDefaultSmoothingSigma;
  SampleReduction reduction = SampleReduction::max;
  std::size_t top_k = 10;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

struct DetectorConfig {
  DetectorKind kind = DetectorKind::patchcore;
  double padim_epsilon = kDefaultPadimEpsilon;
  double coreset_fraction = kDefaultCoresetFraction;
  std::uint64_t seed = 0;
  StfpmConfig stfpm;

  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

struct ScoredSample {
  AnomalyMap patch_map;  // detector resolution
  AnomalyMap map;        // T x F, smoothed, not normalized
  double score = 0.0;
};

using DetectorModel = std::variant<GaussianField, MemoryBank, StudentModel>;

// A fitted detector bound to its pipeline configuration. Immutable after
// construction; scoring is safe from multiple threads.
class Detector {
 public:
  Detector(DetectorConfig cfg, PipelineConfig pipeline, DetectorModel model)
      : cfg_(std::move(cfg)), pipeline_(std::move(pipeline)), model_(std::move(model)) {
    if (pipeline_.extractor.kind == features::ExtractorKind::reference)
      extractor_ = std::make_shared<const features::ReferenceExtractor>(pipeline_.extractor);
  }

  // Fits on training spectrograms through the reference extractor.
  static Detector fit(const DetectorConfig& cfg, const PipelineConfig& pipeline,
                      std::span<const Matrix<double>> train) {
    require(pipeline.extractor.kind == features::ExtractorKind::reference, Errc::parameter,
            "fitting from spectrograms requires the reference extractor");
    if (cfg.kind == DetectorKind::stfpm)
      return Detector(cfg, pipeline, stfpm_train(train, pipeline.extractor, cfg.stfpm));
    const features::ReferenceExtractor ex(pipeline.extractor);
    std::vector<Tensor3<float>> grids;
    grids.reserve(train.size());
    for (const auto& s : train)
      grids.push_back(features::align_and_concat(ex(s), pipeline.extractor.selected_levels).grid);
    return Detector(cfg, pipeline, fit_grids(cfg, grids));
  }

  // Fits on precomputed (e.g. imported) embedding pyramids.
  static Detector fit_embeddings(const DetectorConfig& cfg, const PipelineConfig& pipeline,
                                 std::span<const features::FeatureMapPyramid> train) {
    require(cfg.kind != DetectorKind::stfpm, Errc::parameter,
            "STFPM trains a student network and needs spectrogram inputs");
    std::vector<Tensor3<float>> grids;
    for (const auto& p : train)
      grids.push_back(features::align_and_concat(p, pipeline.extractor.selected_levels).grid);
    return Detector(cfg, pipeline, fit_grids(cfg, grids));
  }

  static DetectorModel fit_grids(const DetectorConfig& cfg, std::span<const Tensor3<float>> grids) {
    switch (cfg.kind) {
      case DetectorKind::padim: return padim_fit(grids, cfg.padim_epsilon);
      case DetectorKind::patchcore: return patchcore_fit(grids, cfg.coreset_fraction, cfg.seed);
      case DetectorKind::stfpm: break;
    }
    fail(Errc::parameter, "STFPM cannot be fitted on patch grids");
  }

  DetectorKind kind() const noexcept { return cfg_.kind; }
  const DetectorConfig& config() const noexcept { return cfg_; }
  const PipelineConfig& pipeline() const noexcept { return pipeline_; }
  const DetectorModel& model() const noexcept { return model_; }

  // Patch-resolution map plus the coord map needed to place it.
  std::pair<AnomalyMap, std::vector<features::CellRect>> patch_map(const Matrix<double>& spec) const {
    if (cfg_.kind == DetectorKind::stfpm) {
      require(extractor_ != nullptr, Errc::architecture, "STFPM requires the reference teacher");
      auto m = stfpm_score(spec, extractor_->net(), std::get<StudentModel>(model_));
      auto coords = features::make_coord_map(m.rows(), m.cols(), spec.rows(), spec.cols());
      return {std::move(m), std::move(coords)};
    }
    require(extractor_ != nullptr, Errc::parameter,
            "model was fitted on imported embeddings; score embeddings instead");
    return grid_map(features::align_and_concat((*extractor_)(spec), pipeline_.extractor.selected_levels));
  }

  std::pair<AnomalyMap, std::vector<features::CellRect>> patch_map(
      const features::FeatureMapPyramid& p) const {
    require(cfg_.kind != DetectorKind::stfpm, Errc::parameter, "STFPM scores spectrograms, not embeddings");
    return grid_map(features::align_and_concat(p, pipeline_.extractor.selected_levels));
  }

  ScoredSample score(const Matrix<double>& spec) const {
    auto [pm, coords] = patch_map(spec);
    return finish(std::move(pm), coords, spec.rows(), spec.cols());
  }

  ScoredSample score(const features::FeatureMapPyramid& p) const {
    auto [pm, coords] = patch_map(p);
    return finish(std::move(pm), coords, p.source_rows, p.source_cols);
  }

  double sample_score_of(const Matrix<double>& spec) const { return score(spec).score; }

 private:
  std::pair<AnomalyMap, std::vector<features::CellRect>> grid_map(const features::PatchGrid& g) const {
    AnomalyMap m = cfg_.kind == DetectorKind::padim ? padim_score(g.grid, std::get<GaussianField>(model_))
                                                    : patchcore_score(g.grid, std::get<MemoryBank>(model_));
    return {std::move(m), g.coord_map};
  }

  ScoredSample finish(AnomalyMap pm, const std::vector<features::CellRect>& coords, std::size_t rows,
                      std::size_t cols) const {
    ScoredSample out;
    out.map = postprocess(pm, coords, rows, cols, pipeline_.smoothing_sigma, false);
    out.score = detectors::sample_score(out.map, pipeline_.reduction, pipeline_.top_k);
    out.patch_map = std::move(pm);
    return out;
  }

  DetectorConfig cfg_;
  PipelineConfig pipeline_;
  DetectorModel model_;
  std::shared_ptr<const features::ReferenceExtractor> extractor_;
};

}  // namespace aad::detectors
