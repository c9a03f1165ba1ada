#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace aad::metrics {

struct MetricsRow {
  std::string method;
  double snr_db = 0.0;
  double sample_roc = std::nan("");
  double sample_f1 = std::nan("");
  double spect_f1 = std::nan("");
  double spect_pro = std::nan("");
  double spect_roc = std::nan("");
  double temp_f1 = std::nan("");
  double temp_roc = std::nan("");
  double ff_v1_mean = std::nan("");
  double ff_v1_std = std::nan("");
  double ff_v2_mean = std::nan("");
  double ff_v2_std = std::nan("");
};

struct MetricsReport {
  std::vector<MetricsRow> rows;
  std::map<std::string, std::string> notes;  // conventions and diagnostics
};

inline constexpr std::array<std::string_view, 13> kReportColumns{
    "method",    "snr_db",   "sample_roc", "sample_f1",  "spect_f1",   "spect_pro", "spect_roc",
    "temp_f1",   "temp_roc", "ff_v1_mean", "ff_v1_std",  "ff_v2_mean", "ff_v2_std"};

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::array<double, 12> numeric_fields(const MetricsRow& r) {
  return {r.snr_db,   r.sample_roc, r.sample_f1,  r.spect_f1,  r.spect_pro,  r.spect_roc,
          r.temp_f1,  r.temp_roc,   r.ff_v1_mean, r.ff_v1_std, r.ff_v2_mean, r.ff_v2_std};
}

inline std::string to_csv(const MetricsReport& report) {
  std::string out;
  for (std::size_t i = 0; i < kReportColumns.size(); ++i) {
    if (i) out += ',';
    out += kReportColumns[i];
  }
  out += '\n';
  for (const auto& r : report.rows) {
    out += r.method;
    for (double v : numeric_fields(r)) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const MetricsReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json j;
    j["method"] = r.method;
    const auto vals = numeric_fields(r);
    for (std::size_t i = 0; i < vals.size(); ++i) j[std::string(kReportColumns[i + 1])] = number_or_null(vals[i]);
    rows.push_back(std::move(j));
  }
  return {{"columns", kReportColumns}, {"rows", rows}, {"notes", report.notes}};
}

inline MetricsReport report_from_json(const nlohmann::json& j) {
  MetricsReport rep;
  for (const auto& jr : j.at("rows")) {
    MetricsRow r;
    r.method = jr.at("method").get<std::string>();
    auto get = [&](std::string_view key) {
      const auto& v = jr.at(std::string(key));
      return v.is_null() ? std::nan("") : v.get<double>();
    };
    r.snr_db = get("snr_db");
    r.sample_roc = get("sample_roc");
    r.sample_f1 = get("sample_f1");
    r.spect_f1 = get("spect_f1");
    r.spect_pro = get("spect_pro");
    r.spect_roc = get("spect_roc");
    r.temp_f1 = get("temp_f1");
    r.temp_roc = get("temp_roc");
    r.ff_v1_mean = get("ff_v1_mean");
    r.ff_v1_std = get("ff_v1_std");
    r.ff_v2_mean = get("ff_v2_mean");
    r.ff_v2_std = get("ff_v2_std");
    rep.rows.push_back(std::move(r));
  }
  if (j.contains("notes")) rep.notes = j.at("notes").get<std::map<std::string, std::string>>();
  return rep;
}

}  // namespace aad::metrics
