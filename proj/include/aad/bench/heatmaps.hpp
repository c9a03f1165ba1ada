#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aad/bench/experiment.hpp"
#include "aad/core/image_io.hpp"

namespace aad::bench {

struct ReportFormats {
  bool csv = true;
  bool json = true;
};

inline void emit_report(const metrics::MetricsReport& report, const std::filesystem::path& dir,
                        ReportFormats formats = {}) {
  if (formats.csv) write_text(dir / "report.csv", metrics::to_csv(report));
  if (formats.json) write_text(dir / "report.json", metrics::to_json(report).dump(2) + "\n");
}

inline metrics::MetricsReport read_report(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return metrics::report_from_json(nlohmann::json::parse(bytes.begin(), bytes.end()));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("report is not valid JSON: ") + e.what(), e.byte, path.string());
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::format, path.string() + ": malformed report: " + e.what());
  }
}

// Three panels stacked top to bottom, each in image layout (time on x, high
// bands on top), separated by a white rule: mixed spectrogram, isolated
// anomaly spectrogram, anomaly map. Each panel is scaled to 0..255 alone.
inline Matrix<std::uint8_t> triptych(const Matrix<double>& mixed, const Matrix<double>& anomaly,
                                     const Matrix<double>& map) {
  require(mixed.same_shape(anomaly) && mixed.same_shape(map), Errc::shape, "triptych panels differ in shape");
  constexpr std::size_t rule = 2;
  const std::size_t h = mixed.cols(), w = mixed.rows();
  Matrix<std::uint8_t> out(3 * h + 2 * rule, w, 255);
  std::size_t top = 0;
  for (const auto* panel : {&mixed, &anomaly, &map}) {
    const auto img = to_image_layout(to_gray(*panel));
    for (std::size_t r = 0; r < h; ++r)
      std::copy(img.row(r).begin(), img.row(r).end(), out.row(top + r).begin());
    top += h + rule;
  }
  return out;
}

// One triptych per anomalous test clip and method under dir/<method>/.
inline std::size_t emit_heatmaps(const LoadedCorpus& corpus,
                                 const std::map<std::string, std::vector<Matrix<double>>>& maps,
                                 const std::filesystem::path& dir, std::size_t jobs = 1) {
  std::vector<std::size_t> anomalous;
  for (std::size_t i = 0; i < corpus.test.size(); ++i)
    if (corpus.test[i].anomalous()) anomalous.push_back(i);
  std::vector<Matrix<double>> iso(anomalous.size());
  parallel_for(anomalous.size(), jobs, [&](std::size_t k) {
    const auto& e = *corpus.test[anomalous[k]].entry;
    iso[k] = read_matrix(corpus.root / e.injection->anomaly_spec_ref);
  });
  std::size_t written = 0;
  for (const auto& [method, m] : maps) {
    require(m.size() == corpus.test.size(), Errc::shape, method + ": one map per test clip is required");
    parallel_for(anomalous.size(), jobs, [&](std::size_t k) {
      const auto& t = corpus.test[anomalous[k]];
      write_pgm(dir / method / (t.entry->clip_id + ".pgm"), triptych(t.spec, iso[k], m[anomalous[k]]));
    });
    written += anomalous.size();
  }
  return written;
}

}  // namespace aad::bench
