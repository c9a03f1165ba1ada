// Command-line front end: mix, spectrogram, extract, fit, score, eval, bench, report.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "aad/aad.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  fs::path out;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
};

void add_common(CLI::App* app, Common& c, bool out_required = true) {
  auto* o = app->add_option("--out", c.out, "Output directory (nothing is written outside it)");
  if (out_required) o->required();
  app->add_option("--jobs", c.jobs, "Maximum worker threads")->check(CLI::PositiveNumber);
}

void add_spectrogram_flags(CLI::App* app, int& sample_rate, aad::audio::SpectrogramParams& p) {
  app->add_option("--sample-rate", sample_rate, "Expected sample rate in Hz")->check(CLI::PositiveNumber);
  app->add_option("--n-fft", p.n_fft, "STFT window length in samples")->check(CLI::PositiveNumber);
  app->add_option("--hop", p.hop, "STFT hop in samples")->check(CLI::PositiveNumber);
  app->add_option("--n-mels", p.n_mels, "Number of mel bands")->check(CLI::PositiveNumber);
}

void add_pipeline_flags(CLI::App* app, aad::detectors::PipelineConfig& p) {
  add_spectrogram_flags(app, p.sample_rate, p.spectrogram);
  app->add_option("--extractor-seed", p.extractor.seed, "Seed of the frozen reference extractor");
  app->add_option("--levels", p.extractor.selected_levels, "Extractor levels to align and concatenate");
  app->add_option("--sigma", p.smoothing_sigma, "Gaussian smoothing sigma in cells (0 disables)")
      ->check(CLI::NonNegativeNumber);
}

struct DetectorFlags {
  std::string detector = "patchcore";
  aad::detectors::DetectorConfig cfg;
  std::uint64_t seed = 1;
};

void add_detector_flags(CLI::App* app, DetectorFlags& d) {
  app->add_option("--detector", d.detector, "Detector: padim, patchcore or stfpm")
      ->check(CLI::IsMember({"padim", "patchcore", "stfpm"}));
  app->add_option("--coreset-fraction", d.cfg.coreset_fraction, "PatchCore coreset fraction in (0, 1]")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--epsilon", d.cfg.padim_epsilon, "PaDiM covariance regularizer")->check(CLI::PositiveNumber);
  app->add_option("--steps", d.cfg.stfpm.steps, "STFPM training steps");
  app->add_option("--lr", d.cfg.stfpm.lr, "STFPM learning rate")->check(CLI::PositiveNumber);
  app->add_option("--batch-size", d.cfg.stfpm.batch_size, "STFPM batch size")->check(CLI::PositiveNumber);
  app->add_option("--seed", d.seed, "Detector seed (STFPM student init and batch order)");
}

aad::detectors::DetectorConfig resolve(const DetectorFlags& d) {
  auto c = d.cfg;
  c.kind = *aad::detectors::parse_detector(d.detector);
  c.seed = d.seed;
  c.stfpm.seed = d.seed;
  return c;
}

void print_config(const std::string& command, const json& cfg) {
  std::cout << "resolved config (" << command << "):\n" << cfg.dump(2) << "\n" << std::flush;
}

std::string stem_of(const fs::path& p) { return p.stem().string(); }

void require_unique_stems(const std::vector<fs::path>& inputs) {
  std::set<std::string> seen;
  for (const auto& p : inputs)
    aad::require(seen.insert(stem_of(p)).second, aad::Errc::parameter,
                 "inputs share the file stem '" + stem_of(p) + "'; outputs would collide");
}

aad::Matrix<double> load_spectrogram(const fs::path& wav, const aad::detectors::PipelineConfig& p) {
  const auto w = aad::audio::read_wav(wav);
  aad::require(w.sample_rate == p.sample_rate, aad::Errc::parameter,
               wav.string() + " has sample rate " + std::to_string(w.sample_rate) + ", expected " +
                   std::to_string(p.sample_rate));
  return aad::audio::log_mel_spectrogram(w, p.spectrogram).values;
}

void write_map(const fs::path& dir, const std::string& stem, const aad::Matrix<double>& m) {
  aad::write_matrix(dir / (stem + ".afm"), m);
  aad::write_pgm(dir / (stem + ".pgm"), aad::to_image_layout(aad::to_gray(m)));
}

// ---- mix

struct MixArgs {
  Common common;
  fs::path background, anomaly;
  std::string background_kind = "tonal_background", anomaly_kind = "chirp_anomaly";
  double duration = 4.0, anomaly_duration = 0.75;
  double snr = 0.0;
  std::size_t start_sample = 16000;
  std::uint64_t seed = 7;
  int sample_rate = 16000;
  aad::audio::SpectrogramParams spectrogram;
};

int run_mix(const MixArgs& a) {
  using namespace aad::audio;
  auto kind = [](const std::string& s) {
    const auto k = parse_clip_kind(s);
    aad::require(k.has_value(), aad::Errc::parameter, "unknown clip kind '" + s + "'");
    return *k;
  };
  json cfg = {{"out", a.common.out.string()}, {"snr_db", a.snr},  {"start_sample", a.start_sample},
              {"seed", a.seed},               {"sample_rate", a.sample_rate}, {"spectrogram", a.spectrogram}};
  cfg["background"] = a.background.empty() ? json{{"synth", a.background_kind}, {"duration_s", a.duration}}
                                           : json(a.background.string());
  cfg["anomaly"] = a.anomaly.empty() ? json{{"synth", a.anomaly_kind}, {"duration_s", a.anomaly_duration}}
                                     : json(a.anomaly.string());
  print_config("mix", cfg);

  const auto bg = a.background.empty() ? synth_clip(kind(a.background_kind), a.duration, a.seed, a.sample_rate)
                                       : read_wav(a.background);
  const auto an = a.anomaly.empty()
                      ? synth_clip(kind(a.anomaly_kind), a.anomaly_duration, a.seed + 1, a.sample_rate)
                      : read_wav(a.anomaly);
  auto mix = mix_at_snr(bg, an, a.snr, a.start_sample,
                        a.anomaly.empty() ? a.anomaly_kind : stem_of(a.anomaly));
  mix.record.anomaly_spec_ref = "anomaly_isolated.afm";
  write_wav(a.common.out / "mixed.wav", mix.mixed);
  write_wav(a.common.out / "background.wav", bg);
  const auto iso = log_mel_spectrogram(isolated_anomaly(an, mix.record, bg.size()), a.spectrogram);
  aad::write_matrix(a.common.out / "anomaly_isolated.afm", iso.values);
  aad::write_text(a.common.out / "injection.json", aad::bench::to_json(mix.record).dump(2) + "\n");
  std::cout << "alpha=" << mix.record.scale_alpha << " clipped_samples=" << mix.record.clip_count << "\n";
  return 0;
}

// ---- spectrogram

struct SpecArgs {
  Common common;
  std::vector<fs::path> inputs;
  int sample_rate = 16000;
  aad::audio::SpectrogramParams spectrogram;
};

int run_spectrogram(const SpecArgs& a) {
  print_config("spectrogram", {{"out", a.common.out.string()},
                               {"inputs", a.inputs.size()},
                               {"sample_rate", a.sample_rate},
                               {"spectrogram", a.spectrogram}});
  require_unique_stems(a.inputs);
  aad::parallel_for(a.inputs.size(), a.common.jobs, [&](std::size_t i) {
    aad::detectors::PipelineConfig p;
    p.sample_rate = a.sample_rate;
    p.spectrogram = a.spectrogram;
    write_map(a.common.out, stem_of(a.inputs[i]), load_spectrogram(a.inputs[i], p));
  });
  return 0;
}

// ---- extract

struct ExtractArgs {
  Common common;
  std::vector<fs::path> inputs;
  aad::detectors::PipelineConfig pipeline;
};

int run_extract(const ExtractArgs& a) {
  print_config("extract", {{"out", a.common.out.string()}, {"inputs", a.inputs.size()}, {"pipeline", a.pipeline}});
  require_unique_stems(a.inputs);
  const aad::features::ReferenceExtractor ex(a.pipeline.extractor);
  aad::parallel_for(a.inputs.size(), a.common.jobs, [&](std::size_t i) {
    aad::features::export_embeddings(ex(load_spectrogram(a.inputs[i], a.pipeline)),
                                     a.common.out / (stem_of(a.inputs[i]) + ".aep1"));
  });
  return 0;
}

// ---- fit

struct FitArgs {
  Common common;
  DetectorFlags det;
  aad::detectors::PipelineConfig pipeline;
  std::vector<fs::path> train;
  std::vector<fs::path> embeddings;
  fs::path manifest;
  std::string name = "model.avdm";
};

int run_fit(const FitArgs& a) {
  const auto dc = resolve(a.det);
  print_config("fit", {{"out", a.common.out.string()},
                       {"detector", dc},
                       {"pipeline", a.pipeline},
                       {"train_wavs", a.train.size()},
                       {"train_embeddings", a.embeddings.size()},
                       {"manifest", a.manifest.string()},
                       {"model_name", a.name}});
  aad::require(fs::path(a.name).filename() == a.name, aad::Errc::parameter, "--name must be a plain file name");
  const int sources = !a.train.empty() + !a.embeddings.empty() + !a.manifest.empty();
  aad::require(sources == 1, aad::Errc::parameter, "give exactly one of --train, --embeddings or --manifest");

  std::optional<aad::detectors::Detector> det;
  if (!a.embeddings.empty()) {
    std::vector<aad::features::FeatureMapPyramid> train;
    for (const auto& p : a.embeddings) train.push_back(aad::features::import_embeddings(p));
    auto pipeline = a.pipeline;
    pipeline.extractor.kind = aad::features::ExtractorKind::imported;
    det = aad::detectors::Detector::fit_embeddings(dc, pipeline, train);
  } else {
    std::vector<fs::path> wavs = a.train;
    if (!a.manifest.empty()) {
      const auto m = aad::bench::read_manifest(a.manifest);
      for (const auto* c : m.select(aad::bench::Split::train)) wavs.push_back(a.manifest.parent_path() / c->wav_path);
    }
    std::vector<aad::Matrix<double>> train(wavs.size());
    aad::parallel_for(wavs.size(), a.common.jobs, [&](std::size_t i) { train[i] = load_spectrogram(wavs[i], a.pipeline); });
    det = aad::detectors::Detector::fit(dc, a.pipeline, train);
  }
  const auto bytes = aad::detectors::encode_model(*det);
  aad::write_file(a.common.out / a.name, bytes);
  std::cout << "model " << (a.common.out / a.name).string() << " crc32=" << std::hex
            << aad::crc32(std::span(bytes).first(bytes.size() - 4)) << std::dec << "\n";
  return 0;
}

// ---- score

struct ScoreArgs {
  Common common;
  fs::path model;
  std::vector<fs::path> inputs;
  bool normalize = false;
};

int run_score(const ScoreArgs& a) {
  const auto det = aad::detectors::load_model(a.model);
  print_config("score", {{"out", a.common.out.string()},
                         {"model", a.model.string()},
                         {"detector", det.config()},
                         {"pipeline", det.pipeline()},
                         {"inputs", a.inputs.size()},
                         {"normalize", a.normalize}});
  require_unique_stems(a.inputs);
  std::vector<double> scores(a.inputs.size());
  aad::parallel_for(a.inputs.size(), a.common.jobs, [&](std::size_t i) {
    const auto& in = a.inputs[i];
    const auto s = in.extension() == ".aep1" ? det.score(aad::features::import_embeddings(in))
                                             : det.score(load_spectrogram(in, det.pipeline()));
    auto map = aad::round_to_f32(s.map.values);
    scores[i] = aad::bench::map_score(map, det.pipeline());
    if (a.normalize) map = aad::bench::normalized(map);
    write_map(a.common.out, stem_of(in), map);
  });
  std::string csv = "input,score\n";
  for (std::size_t i = 0; i < a.inputs.size(); ++i)
    csv += a.inputs[i].filename().string() + "," + aad::metrics::format_number(scores[i]) + "\n";
  aad::write_text(a.common.out / "scores.csv", csv);
  std::cout << csv;
  return 0;
}

// ---- eval

struct EvalArgs {
  Common common;
  fs::path manifest, maps;
  std::string method = "patchcore";
  fs::path model;
  aad::bench::MetricConfig metrics;
};

int run_eval(const EvalArgs& a) {
  aad::detectors::PipelineConfig pipeline;
  std::optional<aad::detectors::Detector> det;
  if (!a.model.empty()) {
    det = aad::detectors::load_model(a.model);
    pipeline = det->pipeline();
  }
  auto mc = a.metrics;
  mc.faithfulness = mc.faithfulness && det.has_value();
  print_config("eval", {{"out", a.common.out.string()},
                        {"manifest", a.manifest.string()},
                        {"maps", a.maps.string()},
                        {"method", a.method},
                        {"model", a.model.string()},
                        {"metrics", mc}});
  const auto m = aad::bench::read_manifest(a.manifest);
  const auto corpus = aad::bench::load_corpus(m, a.manifest.parent_path(), a.common.jobs);
  const auto maps = aad::bench::read_maps(a.maps, a.method, corpus);
  aad::metrics::SpectrogramScorer scorer;
  if (det)
    scorer = [&](const aad::Matrix<double>& x) {
      return aad::bench::map_score(aad::round_to_f32(det->score(x).map.values), pipeline);
    };
  aad::metrics::MetricsReport rep;
  rep.notes = aad::bench::convention_notes();
  rep.rows = aad::bench::evaluate_maps(a.method, corpus, maps, pipeline, mc, scorer, rep.notes, a.common.jobs);
  aad::bench::emit_report(rep, a.common.out);
  std::cout << aad::metrics::to_csv(rep);
  return 0;
}

// ---- bench

struct BenchArgs {
  Common common;
  fs::path config;
  std::uint64_t seed = 7;
  std::vector<std::string> detectors;
  std::vector<double> snr;
  std::size_t n_train = 40, n_test_normal = 20, n_test_anomalous = 20;
  double coreset_fraction = aad::detectors::kDefaultCoresetFraction;
  double epsilon = aad::detectors::kDefaultPadimEpsilon;
  std::size_t steps = 500;
  double lr = 0.01;
  double sigma = aad::detectors::kDefaultSmoothingSigma;
  int sample_rate = 16000;
  aad::audio::SpectrogramParams spectrogram;
  bool no_heatmaps = false;
  bool no_ff = false;
};

int run_bench(const BenchArgs& a, const CLI::App& sub) {
  using aad::bench::ExperimentConfig;
  ExperimentConfig cfg;
  std::string config_text;
  if (!a.config.empty()) {
    const auto bytes = aad::read_file(a.config);
    config_text.assign(bytes.begin(), bytes.end());
    cfg = aad::bench::parse_experiment_config(config_text, a.config.string());
  }
  auto given = [&](const char* flag) { return sub.count(flag) > 0; };
  if (given("--seed")) cfg.seed = a.seed;
  if (given("--detector")) {
    cfg.detectors.clear();
    for (const auto& d : a.detectors) {
      aad::detectors::DetectorConfig dc;
      dc.kind = *aad::detectors::parse_detector(d);
      cfg.detectors.push_back(dc);
    }
  }
  for (auto& dc : cfg.detectors) {
    if (given("--coreset-fraction")) dc.coreset_fraction = a.coreset_fraction;
    if (given("--epsilon")) dc.padim_epsilon = a.epsilon;
    if (given("--steps")) dc.stfpm.steps = a.steps;
    if (given("--lr")) dc.stfpm.lr = a.lr;
  }
  if (given("--snr")) cfg.corpus.snr_levels = a.snr;
  if (given("--n-train")) cfg.corpus.n_train = a.n_train;
  if (given("--n-test-normal")) cfg.corpus.n_test_normal = a.n_test_normal;
  if (given("--n-test-anomalous")) cfg.corpus.n_test_anomalous = a.n_test_anomalous;
  if (given("--sample-rate")) cfg.corpus.sample_rate = a.sample_rate;
  if (given("--n-fft")) cfg.corpus.spectrogram.n_fft = a.spectrogram.n_fft;
  if (given("--hop")) cfg.corpus.spectrogram.hop = a.spectrogram.hop;
  if (given("--n-mels")) cfg.corpus.spectrogram.n_mels = a.spectrogram.n_mels;
  if (given("--sigma")) cfg.pipeline.smoothing_sigma = a.sigma;
  if (a.no_ff) cfg.metrics.faithfulness = false;
  cfg.pipeline.spectrogram = cfg.corpus.spectrogram;
  cfg.pipeline.sample_rate = cfg.corpus.sample_rate;
  cfg.validate();

  json resolved = cfg;
  print_config("bench", {{"out", a.common.out.string()},
                         {"jobs", a.common.jobs},
                         {"heatmaps", !a.no_heatmaps},
                         {"experiment", resolved}});
  const auto& out = a.common.out;
  if (!config_text.empty()) aad::write_text(out / "config.input.json", config_text);
  aad::write_text(out / "config.resolved.json", resolved.dump(2) + "\n");

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> regenerated;
  const auto manifest = aad::bench::build_corpus(cfg.corpus, cfg.seed, out / "corpus", a.common.jobs, &regenerated);
  for (const auto& r : regenerated) std::cerr << "corpus: " << r << "\n";
  const auto corpus = aad::bench::load_corpus(manifest, out / "corpus", a.common.jobs);
  auto res = aad::bench::run_experiment(corpus, cfg, out, a.common.jobs, &std::cerr);
  for (const auto& [m, crc] : res.model_crc) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", crc);
    res.report.notes["model_crc32." + m] = buf;
  }
  for (std::size_t i = 0; i < regenerated.size(); ++i) res.report.notes["corpus.regenerated." + std::to_string(i)] = regenerated[i];
  aad::bench::emit_report(res.report, out);
  if (!a.no_heatmaps) aad::bench::emit_heatmaps(corpus, res.maps, out / "heatmaps", a.common.jobs);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << aad::metrics::to_csv(res.report);
  for (const auto& [k, v] : res.report.notes)
    if (k.rfind("error.", 0) == 0 || k.rfind("model_crc32.", 0) == 0) std::cout << k << ": " << v << "\n";
  std::cerr << "bench finished in " << secs << " s\n";
  return 0;
}

// ---- report

struct ReportArgs {
  Common common;
  fs::path input;
  fs::path manifest, maps;
  bool csv = true, json_out = true;
};

int run_report(const ReportArgs& a) {
  print_config("report", {{"out", a.common.out.string()},
                          {"input", a.input.string()},
                          {"manifest", a.manifest.string()},
                          {"maps", a.maps.string()}});
  const auto rep = aad::bench::read_report(a.input);
  aad::bench::emit_report(rep, a.common.out);
  if (!a.manifest.empty()) {
    aad::require(!a.maps.empty(), aad::Errc::parameter, "--manifest needs --maps to render heatmaps");
    const auto m = aad::bench::read_manifest(a.manifest);
    const auto corpus = aad::bench::load_corpus(m, a.manifest.parent_path(), a.common.jobs);
    std::map<std::string, std::vector<aad::Matrix<double>>> maps;
    for (const auto& row : rep.rows)
      if (!maps.count(row.method) && fs::exists(a.maps / "maps" / row.method))
        maps[row.method] = aad::bench::read_maps(a.maps, row.method, corpus);
    const auto n = aad::bench::emit_heatmaps(corpus, maps, a.common.out / "heatmaps", a.common.jobs);
    std::cout << n << " heatmaps written\n";
  }
  std::cout << aad::metrics::to_csv(rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anomaly detection in audio mixtures: synthesis, features, detectors and metrics"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  MixArgs mix;
  auto* c_mix = app.add_subcommand("mix", "Mix an anomaly into a background at a target SNR");
  add_common(c_mix, mix.common);
  c_mix->add_option("--background", mix.background, "Background WAV (synthesized when omitted)")->check(CLI::ExistingFile);
  c_mix->add_option("--anomaly", mix.anomaly, "Anomaly WAV (synthesized when omitted)")->check(CLI::ExistingFile);
  c_mix->add_option("--background-kind", mix.background_kind, "Synthetic background kind");
  c_mix->add_option("--anomaly-kind", mix.anomaly_kind, "Synthetic anomaly kind");
  c_mix->add_option("--duration", mix.duration, "Synthetic background length in seconds");
  c_mix->add_option("--anomaly-duration", mix.anomaly_duration, "Synthetic anomaly length in seconds");
  c_mix->add_option("--snr", mix.snr, "Target SNR in dB over the overlap window");
  c_mix->add_option("--start-sample", mix.start_sample, "Injection start sample");
  c_mix->add_option("--seed", mix.seed, "Synthesis seed");
  add_spectrogram_flags(c_mix, mix.sample_rate, mix.spectrogram);

  SpecArgs spec;
  auto* c_spec = app.add_subcommand("spectrogram", "Compute log-mel spectrograms (AFM1 + PGM preview)");
  add_common(c_spec, spec.common);
  c_spec->add_option("--input", spec.inputs, "Input WAV files")->required()->check(CLI::ExistingFile);
  add_spectrogram_flags(c_spec, spec.sample_rate, spec.spectrogram);

  ExtractArgs ext;
  auto* c_ext = app.add_subcommand("extract", "Run the reference extractor and write AEP1 embedding files");
  add_common(c_ext, ext.common);
  c_ext->add_option("--input", ext.inputs, "Input WAV files")->required()->check(CLI::ExistingFile);
  add_pipeline_flags(c_ext, ext.pipeline);

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Fit a detector on normal training clips and save the model");
  add_common(c_fit, fit.common);
  add_detector_flags(c_fit, fit.det);
  add_pipeline_flags(c_fit, fit.pipeline);
  c_fit->add_option("--train", fit.train, "Training WAV files")->check(CLI::ExistingFile);
  c_fit->add_option("--embeddings", fit.embeddings, "Training AEP1 files (PaDiM/PatchCore)")->check(CLI::ExistingFile);
  c_fit->add_option("--manifest", fit.manifest, "Dataset manifest; its train split is used")->check(CLI::ExistingFile);
  c_fit->add_option("--name", fit.name, "Model file name inside --out");

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Score WAV or AEP1 inputs with a saved model");
  add_common(c_score, score.common);
  c_score->add_option("--model", score.model, "Model file (AVDM)")->required()->check(CLI::ExistingFile);
  c_score->add_option("--input", score.inputs, "WAV or .aep1 inputs")->required()->check(CLI::ExistingFile);
  c_score->add_flag("--normalize", score.normalize, "Write min-max normalized maps");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Compute metrics from stored maps and a manifest");
  add_common(c_eval, ev.common);
  c_eval->add_option("--manifest", ev.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--maps", ev.maps, "Directory holding maps/<method>/<clip_id>.afm")->required()->check(CLI::ExistingDirectory);
  c_eval->add_option("--detector", ev.method, "Method whose maps are evaluated");
  c_eval->add_option("--model", ev.model, "Model file; enables faithfulness metrics")->check(CLI::ExistingFile);
  c_eval->add_option("--pro-fpr-limit", ev.metrics.pro_fpr_limit, "AU-PRO FPR integration limit")->check(CLI::Range(0.0, 1.0));

  BenchArgs b;
  auto* c_bench = app.add_subcommand("bench", "Build a synthetic corpus, run all detectors and write the report");
  add_common(c_bench, b.common);
  c_bench->add_option("--config", b.config, "Experiment config JSON (echoed into --out)")->check(CLI::ExistingFile);
  c_bench->add_option("--seed", b.seed, "Corpus seed");
  c_bench->add_option("--detector", b.detectors, "Detectors to run (default: padim patchcore stfpm)")
      ->check(CLI::IsMember({"padim", "patchcore", "stfpm"}));
  c_bench->add_option("--snr", b.snr, "SNR levels in dB (default: 6 0 -6)");
  c_bench->add_option("--n-train", b.n_train, "Normal training clips");
  c_bench->add_option("--n-test-normal", b.n_test_normal, "Normal test clips");
  c_bench->add_option("--n-test-anomalous", b.n_test_anomalous, "Anomalous test clips per SNR");
  c_bench->add_option("--coreset-fraction", b.coreset_fraction, "PatchCore coreset fraction")->check(CLI::Range(0.0, 1.0));
  c_bench->add_option("--epsilon", b.epsilon, "PaDiM covariance regularizer")->check(CLI::PositiveNumber);
  c_bench->add_option("--steps", b.steps, "STFPM training steps");
  c_bench->add_option("--lr", b.lr, "STFPM learning rate")->check(CLI::PositiveNumber);
  c_bench->add_option("--sigma", b.sigma, "Map smoothing sigma in cells")->check(CLI::NonNegativeNumber);
  add_spectrogram_flags(c_bench, b.sample_rate, b.spectrogram);
  c_bench->add_flag("--no-heatmaps", b.no_heatmaps, "Skip triptych heatmaps");
  c_bench->add_flag("--no-ff", b.no_ff, "Skip faithfulness metrics");

  ReportArgs rep;
  auto* c_rep = app.add_subcommand("report", "Re-render CSV/JSON (and heatmaps) from a report.json");
  add_common(c_rep, rep.common);
  c_rep->add_option("--input", rep.input, "report.json to re-render")->required()->check(CLI::ExistingFile);
  c_rep->add_option("--manifest", rep.manifest, "Manifest, to render heatmaps")->check(CLI::ExistingFile);
  c_rep->add_option("--maps", rep.maps, "Run directory holding maps/")->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c_mix->parsed()) return run_mix(mix);
    if (c_spec->parsed()) return run_spectrogram(spec);
    if (c_ext->parsed()) return run_extract(ext);
    if (c_fit->parsed()) return run_fit(fit);
    if (c_score->parsed()) return run_score(score);
    if (c_eval->parsed()) return run_eval(ev);
    if (c_bench->parsed()) return run_bench(b, *c_bench);
    if (c_rep->parsed()) return run_report(rep);
  } catch (const aad::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
