#pragma once

#include <nlohmann/json.hpp>

#include "aad/detectors/detector.hpp"

namespace aad::audio {

inline void to_json(nlohmann::json& j, const SpectrogramParams& p) {
  j = {{"n_fft", p.n_fft}, {"hop", p.hop},         {"n_mels", p.n_mels},
       {"fmin", p.fmin},   {"fmax", p.fmax},       {"log_offset", p.log_offset}};
}

inline void from_json(const nlohmann::json& j, SpectrogramParams& p) {
  SpectrogramParams d;
  p.n_fft = j.value("n_fft", d.n_fft);
  p.hop = j.value("hop", d.hop);
  p.n_mels = j.value("n_mels", d.n_mels);
  p.fmin = j.value("fmin", d.fmin);
  p.fmax = j.value("fmax", d.fmax);
  p.log_offset = j.value("log_offset", d.log_offset);
}

}  // namespace aad::audio

namespace aad::features {

inline void to_json(nlohmann::json& j, const ExtractorSpec& s) {
  j = {{"kind", s.kind == ExtractorKind::reference ? "reference" : "imported"},
       {"seed", s.seed},
       {"channels_per_block", s.channels_per_block},
       {"selected_levels", s.selected_levels}};
}

inline void from_json(const nlohmann::json& j, ExtractorSpec& s) {
  ExtractorSpec d;
  const auto kind = j.value("kind", std::string("reference"));
  require(kind == "reference" || kind == "imported", Errc::config, "unknown extractor kind '" + kind + "'");
  s.kind = kind == "reference" ? ExtractorKind::reference : ExtractorKind::imported;
  s.seed = j.value("seed", d.seed);
  s.channels_per_block = j.value("channels_per_block", d.channels_per_block);
  s.selected_levels = j.value("selected_levels", d.selected_levels);
}

}  // namespace aad::features

namespace aad::detectors {

inline void to_json(nlohmann::json& j, const StfpmConfig& c) {
  j = {{"steps", c.steps}, {"lr", c.lr}, {"momentum", c.momentum}, {"seed", c.seed},
       {"batch_size", c.batch_size}};
}

inline void from_json(const nlohmann::json& j, StfpmConfig& c) {
  StfpmConfig d;
  c.steps = j.value("steps", d.steps);
  c.lr = j.value("lr", d.lr);
  c.momentum = j.value("momentum", d.momentum);
  c.seed = j.value("seed", d.seed);
  c.batch_size = j.value("batch_size", d.batch_size);
}

inline void to_json(nlohmann::json& j, const PipelineConfig& p) {
  j = {{"sample_rate", p.sample_rate},
       {"spectrogram", p.spectrogram},
       {"extractor", p.extractor},
       {"smoothing_sigma", p.smoothing_sigma},
       {"sample_reduction", std::string(to_string(p.reduction))},
       {"top_k", p.top_k}};
}

inline void from_json(const nlohmann::json& j, PipelineConfig& p) {
  PipelineConfig d;
  p.sample_rate = j.value("sample_rate", d.sample_rate);
  p.spectrogram = j.value("spectrogram", d.spectrogram);
  p.extractor = j.value("extractor", d.extractor);
  p.smoothing_sigma = j.value("smoothing_sigma", d.smoothing_sigma);
  const auto red = j.value("sample_reduction", std::string("max"));
  const auto parsed = parse_sample_reduction(red);
  require(parsed.has_value(), Errc::config, "unknown sample reduction '" + red + "'");
  p.reduction = *parsed;
  p.top_k = j.value("top_k", d.top_k);
}

inline void to_json(nlohmann::json& j, const DetectorConfig& c) {
  j = {{"detector", std::string(to_string(c.kind))},
       {"epsilon", c.padim_epsilon},
       {"coreset_fraction", c.coreset_fraction},
       {"seed", c.seed},
       {"stfpm", c.stfpm}};
}

inline void from_json(const nlohmann::json& j, DetectorConfig& c) {
  DetectorConfig d;
  const auto name = j.value("detector", std::string("patchcore"));
  const auto kind = parse_detector(name);
  require(kind.has_value(), Errc::config, "unknown detector '" + name + "'");
  c.kind = *kind;
  c.padim_epsilon = j.value("epsilon", d.padim_epsilon);
  c.coreset_fraction = j.value("coreset_fraction", d.coreset_fraction);
  c.seed = j.value("seed", d.seed);
  c.stfpm = j.value("stfpm", d.stfpm);
}

}  // namespace aad::detectors
