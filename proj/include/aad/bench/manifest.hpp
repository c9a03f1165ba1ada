#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aad/audio/mix.hpp"
#include "aad/audio/spectrogram.hpp"
#include "aad/core/binary.hpp"
#include "aad/detectors/config_json.hpp"

namespace aad::bench {

enum class Split { train, test };
enum class Label { normal, anomalous };

inline std::string_view to_string(Split s) { return s == Split::train ? "train" : "test"; }
inline std::string_view to_string(Label l) { return l == Label::normal ? "normal" : "anomalous"; }

// One clip; all paths are relative to the manifest's directory.
struct ClipEntry {
  std::string clip_id;
  std::string wav_path;
  Split split = Split::train;
  Label label = Label::normal;
  std::optional<audio::InjectionRecord> injection;
  std::string gt_mask_path;         // PGM, image layout
  std::string background_wav_path;  // anomalous clips: the unmixed background
  std::string temporal_gt;          // one '0'/'1' per frame
};

struct ManifestHeader {
  int version = 1;
  std::uint64_t seed = 0;
  int sample_rate = 16000;
  audio::SpectrogramParams spectrogram;
};

// Dataset description with its invariants checked on construction: the train
// split is normal-only and every anomalous clip carries its ground truth.
class DatasetManifest {
 public:
  DatasetManifest() = default;
  DatasetManifest(ManifestHeader header, std::vector<ClipEntry> clips)
      : header_(std::move(header)), clips_(std::move(clips)) {
    std::set<std::string> ids;
    for (const auto& c : clips_) {
      require(!c.clip_id.empty() && !c.wav_path.empty(), Errc::config, "clip without id or wav path");
      require(ids.insert(c.clip_id).second, Errc::config, "duplicate clip id '" + c.clip_id + "'");
      require(!(c.split == Split::train && c.label == Label::anomalous), Errc::config,
              "anomalous clip '" + c.clip_id + "' in the train split");
      if (c.label == Label::anomalous)
        require(c.injection.has_value() && !c.gt_mask_path.empty(), Errc::config,
                "anomalous clip '" + c.clip_id + "' lacks an injection record or gt mask");
    }
  }

  const ManifestHeader& header() const noexcept { return header_; }
  const std::vector<ClipEntry>& clips() const noexcept { return clips_; }

  std::vector<const ClipEntry*> select(Split s) const {
    std::vector<const ClipEntry*> out;
    for (const auto& c : clips_)
      if (c.split == s) out.push_back(&c);
    return out;
  }

  // Distinct SNRs of anomalous test clips, in first-appearance order.
  std::vector<double> snr_levels() const {
    std::vector<double> out;
    for (const auto& c : clips_)
      if (c.injection && std::find(out.begin(), out.end(), c.injection->snr_db) == out.end())
        out.push_back(c.injection->snr_db);
    return out;
  }

 private:
  ManifestHeader header_;
  std::vector<ClipEntry> clips_;
};

inline nlohmann::json to_json(const audio::InjectionRecord& r) {
  return {{"anomaly_id", r.anomaly_id},         {"t_start_sample", r.t_start_sample},
          {"t_end_sample", r.t_end_sample},     {"snr_db", r.snr_db},
          {"scale_alpha", r.scale_alpha},       {"anomaly_spec_ref", r.anomaly_spec_ref},
          {"clip_count", r.clip_count}};
}

inline audio::InjectionRecord injection_from_json(const nlohmann::json& j) {
  audio::InjectionRecord r;
  r.anomaly_id = j.at("anomaly_id").get<std::string>();
  r.t_start_sample = j.at("t_start_sample").get<std::size_t>();
  r.t_end_sample = j.at("t_end_sample").get<std::size_t>();
  r.snr_db = j.at("snr_db").get<double>();
  r.scale_alpha = j.at("scale_alpha").get<double>();
  r.anomaly_spec_ref = j.value("anomaly_spec_ref", std::string());
  r.clip_count = j.value("clip_count", std::size_t{0});
  return r;
}

inline nlohmann::json to_json(const DatasetManifest& m) {
  nlohmann::json clips = nlohmann::json::array();
  for (const auto& c : m.clips()) {
    nlohmann::json e = {{"clip_id", c.clip_id},
                        {"wav_path", c.wav_path},
                        {"split", std::string(to_string(c.split))},
                        {"label", std::string(to_string(c.label))}};
    if (c.injection) e["injection"] = to_json(*c.injection);
    if (!c.gt_mask_path.empty()) e["gt_mask_path"] = c.gt_mask_path;
    if (!c.background_wav_path.empty()) e["background_wav_path"] = c.background_wav_path;
    if (!c.temporal_gt.empty()) e["temporal_gt"] = c.temporal_gt;
    clips.push_back(std::move(e));
  }
  return {{"version", m.header().version},
          {"seed", m.header().seed},
          {"sample_rate", m.header().sample_rate},
          {"spectrogram", m.header().spectrogram},
          {"clips", std::move(clips)}};
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
  try {
    ManifestHeader h;
    h.version = j.at("version").get<int>();
    require(h.version == 1, Errc::config, "unsupported manifest version " + std::to_string(h.version));
    h.seed = j.value("seed", std::uint64_t{0});
    h.sample_rate = j.value("sample_rate", 16000);
    h.spectrogram = j.value("spectrogram", audio::SpectrogramParams{});
    std::vector<ClipEntry> clips;
    for (const auto& e : j.at("clips")) {
      ClipEntry c;
      c.clip_id = e.at("clip_id").get<std::string>();
      c.wav_path = e.at("wav_path").get<std::string>();
      const auto split = e.at("split").get<std::string>();
      const auto label = e.at("label").get<std::string>();
      require(split == "train" || split == "test", Errc::config, "unknown split '" + split + "'");
      require(label == "normal" || label == "anomalous", Errc::config, "unknown label '" + label + "'");
      c.split = split == "train" ? Split::train : Split::test;
      c.label = label == "normal" ? Label::normal : Label::anomalous;
      if (e.contains("injection")) c.injection = injection_from_json(e["injection"]);
      c.gt_mask_path = e.value("gt_mask_path", std::string());
      c.background_wav_path = e.value("background_wav_path", std::string());
      c.temporal_gt = e.value("temporal_gt", std::string());
      clips.push_back(std::move(c));
    }
    return DatasetManifest(std::move(h), std::move(clips));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::config, std::string("malformed manifest: ") + e.what());
  }
}

inline void write_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  write_text(path, to_json(m).dump(2) + "\n");
}

inline DatasetManifest read_manifest(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what(), e.byte, path.string());
  }
  return manifest_from_json(j);
}

}  // namespace aad::bench
