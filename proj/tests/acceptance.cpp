// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. The end-to-end and determinism checks drive the real CLI.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aad/aad.hpp"
#include "oracles.hpp"

using namespace aad;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failed checks without stopping at the first one.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (!ok) failures_.push_back(what);
  }
  template <typename F>
  void expect_error(F&& f, Errc code, const std::string& what) {
    try {
      f();
    } catch (const Error& e) {
      expect(e.code() == code, what + " (got " + errc_name(e.code()) + ")");
      return;
    }
    expect(false, what + " (nothing thrown)");
  }
  Outcome outcome(std::string summary) const {
    Outcome o{failures_.empty(), std::move(summary)};
    for (std::size_t i = 0; i < failures_.size() && i < 5; ++i) o.detail += "; failed: " + failures_[i];
    if (failures_.size() > 5) o.detail += "; ...";
    return o;
  }
  std::size_t total() const { return total_; }

 private:
  std::size_t total_ = 0;
  std::vector<std::string> failures_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

Tensor3<float> random_grid(std::size_t h, std::size_t w, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<float> d(0.0f, 1.0f);
  Tensor3<float> t(h, w, c);
  for (float& v : t.data()) v = d(rng);
  return t;
}

std::vector<float> as_vec(std::span<const float> s) { return {s.begin(), s.end()}; }

// ---- oracle equivalence

double padim_worst_relative_error(std::mt19937_64& rng) {
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t c = 1 + rng() % 8, n = 2 + rng() % 14, h = 1 + rng() % 2, w = 1 + rng() % 2;
    std::vector<Tensor3<float>> train;
    for (std::size_t i = 0; i < n; ++i) train.push_back(random_grid(h, w, c, rng));
    const auto query = random_grid(h, w, c, rng);
    const auto field = detectors::padim_fit(train, detectors::kDefaultPadimEpsilon);
    const auto got = detectors::padim_score(query, field);
    for (std::size_t p = 0; p < h * w; ++p) {
      std::vector<double> mu(c, 0.0);
      for (const auto& g : train)
        for (std::size_t k = 0; k < c; ++k) mu[k] += g.vec(p)[k];
      for (double& m : mu) m /= static_cast<double>(n);
      oracle::Mat cov(c, std::vector<double>(c, 0.0));
      for (const auto& g : train)
        for (std::size_t r = 0; r < c; ++r)
          for (std::size_t k = 0; k < c; ++k) cov[r][k] += (g.vec(p)[r] - mu[r]) * (g.vec(p)[k] - mu[k]);
      for (std::size_t r = 0; r < c; ++r) {
        for (std::size_t k = 0; k < c; ++k) cov[r][k] /= static_cast<double>(n - 1);
        cov[r][r] += detectors::kDefaultPadimEpsilon;
      }
      const auto inv = oracle::inverse(cov);
      double q = 0.0;
      for (std::size_t r = 0; r < c; ++r)
        for (std::size_t k = 0; k < c; ++k)
          q += (query.vec(p)[r] - mu[r]) * inv[r][k] * (query.vec(p)[k] - mu[k]);
      const double want = std::sqrt(q);
      worst = std::max(worst, std::abs(got.values.data()[p] - want) / std::max(std::abs(want), 1e-300));
    }
  }
  return worst;
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  Checks ck;

  const double padim_err = padim_worst_relative_error(rng);
  ck.expect(padim_err <= 1e-6, "padim relative error " + fmt(padim_err));

  int coreset_mismatch = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 50, c = 1 + rng() % 6;
    Matrix<float> pool(n, c);
    std::vector<std::vector<float>> ref(n, std::vector<float>(c));
    const bool integer = trial % 2 == 0;  // integer grids force distance ties
    std::uniform_int_distribution<int> di(-3, 3);
    std::normal_distribution<float> dn(0.0f, 1.0f);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < c; ++k)
        ref[i][k] = pool(i, k) = integer ? static_cast<float>(di(rng)) : dn(rng);
    const std::size_t k = 1 + rng() % n;
    coreset_mismatch += detectors::greedy_coreset(pool, k) != oracle::greedy_k_center(ref, k);
  }
  ck.expect(coreset_mismatch == 0, std::to_string(coreset_mismatch) + " coreset selections differ");

  int nn_mismatch = 0, nn_total = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t c = 1 + rng() % 16;
    std::vector<Tensor3<float>> train{random_grid(4, 5, c, rng), random_grid(4, 5, c, rng)};
    const double fraction = 0.05 + 0.95 * std::uniform_real_distribution<double>(0, 1)(rng);
    const auto bank = detectors::patchcore_fit(train, fraction);
    std::vector<std::vector<float>> ref;
    for (std::size_t i = 0; i < bank.size(); ++i) ref.push_back(as_vec(bank.coreset.row(i)));
    const auto q = random_grid(3, 6, c, rng);
    const auto m = detectors::patchcore_score(q, bank);
    for (std::size_t p = 0; p < q.positions(); ++p, ++nn_total)
      nn_mismatch += m.values.data()[p] != oracle::nn_distance(as_vec(q.vec(p)), ref);
  }
  ck.expect(nn_mismatch == 0, std::to_string(nn_mismatch) + "/" + std::to_string(nn_total) + " 1-NN scores differ");

  double roc_err = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 199;
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial % 2 ? static_cast<double>(rng() % 20) : std::normal_distribution<double>()(rng);
      y[i] = rng() % 2;
    }
    y[0] = 1;
    y[1] = 0;
    roc_err = std::max(roc_err, std::abs(metrics::roc_auc(s, y) - oracle::pairwise_auc(s, y)));
  }
  ck.expect(roc_err <= 1e-9, "roc_auc error " + fmt(roc_err));

  double pro_err = 0.0;
  int pro_cases = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n_maps = 1 + rng() % 3;
    std::vector<Matrix<double>> maps;
    std::vector<metrics::BinaryMask> gts;
    std::vector<std::vector<std::vector<double>>> om;
    std::vector<std::vector<std::vector<int>>> ok;
    std::size_t pos = 0, neg = 0;
    for (std::size_t m = 0; m < n_maps; ++m) {
      const std::size_t h = 1 + rng() % 6, w = 1 + rng() % 6;
      Matrix<double> v(h, w);
      metrics::BinaryMask g{Matrix<std::uint8_t>(h, w), metrics::MaskRole::ground_truth};
      std::vector<std::vector<double>> rv(h, std::vector<double>(w));
      std::vector<std::vector<int>> rk(h, std::vector<int>(w));
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
          rv[i][j] = v(i, j) = trial % 2 ? static_cast<double>(rng() % 9) / 8.0
                                         : std::uniform_real_distribution<double>()(rng);
          rk[i][j] = g.values(i, j) = rng() % 3 == 0;
          (rk[i][j] ? pos : neg) += 1;
        }
      maps.push_back(v);
      gts.push_back(g);
      om.push_back(rv);
      ok.push_back(rk);
    }
    if (!pos || !neg) continue;
    ++pro_cases;
    for (double limit : {0.3, 1.0})
      pro_err = std::max(pro_err, std::abs(metrics::au_pro(maps, gts, limit) - oracle::au_pro_sweep(om, ok, limit)));
  }
  ck.expect(pro_err <= 1e-9, "au_pro error " + fmt(pro_err));

  int f1_mismatch = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 2 + rng() % 11;
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 6);
      y[i] = rng() % 2;
    }
    y[0] = 1;
    y[1] = 0;
    f1_mismatch += metrics::best_f1(s, y).f1 != oracle::exhaustive_best_f1(s, y);
  }
  ck.expect(f1_mismatch == 0, std::to_string(f1_mismatch) + " best_f1 values differ");

  const double secs = seconds_since(t0);
  ck.expect(secs < 30.0, "runtime " + fmt(secs) + " s");
  return ck.outcome("padim rel err " + fmt(padim_err) + ", roc err " + fmt(roc_err) + ", pro err " +
                    fmt(pro_err) + " over " + std::to_string(pro_cases) + " cases, " + fmt(secs) + " s");
}

// ---- STFPM gradient check

Matrix<double> random_spec(std::size_t t, std::size_t f, std::mt19937_64& rng) {
  std::normal_distribution<double> d(-4.0, 1.5);
  Matrix<double> m(t, f);
  for (double& v : m.data()) v = d(rng);
  return m;
}

Outcome stfpm_gradient() {
  const auto t0 = std::chrono::steady_clock::now();
  Checks ck;
  std::mt19937_64 rng(31);
  features::ExtractorSpec spec;  // three blocks, all levels selected
  spec.seed = 5;
  const features::ReferenceExtractor teacher(spec);
  const auto blocks = detectors::detail::selected_blocks(spec);
  const auto x = random_spec(20, 16, rng);
  const auto tf = detectors::teacher_features(teacher.net(), x, spec.channels_per_block.size());
  auto student = detectors::init_student(spec, 11);
  features::ConvGrad g;
  detectors::stfpm_loss(student, x, tf, blocks, &g);

  const double h = 1e-4;
  const int probes = 240;
  double worst = 0.0;
  for (int probe = 0; probe < probes; ++probe) {
    const std::size_t b = static_cast<std::size_t>(probe) % student.depth();
    auto& w = student.blocks()[b].weight;
    const std::size_t q = rng() % w.size();
    const double w0 = w[q];
    w[q] = w0 + h;
    const double lp = detectors::stfpm_loss(student, x, tf, blocks, nullptr);
    w[q] = w0 - h;
    const double lm = detectors::stfpm_loss(student, x, tf, blocks, nullptr);
    w[q] = w0;
    const double fd = (lp - lm) / (2 * h);
    const double an = g.weight[b][q];
    worst = std::max(worst, std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8}));
  }
  ck.expect(worst < 1e-4, "max relative gradient error " + fmt(worst));

  std::vector<Matrix<double>> train;
  for (int i = 0; i < 4; ++i) train.push_back(random_spec(24, 16, rng));
  detectors::StfpmConfig cfg;
  cfg.seed = 3;
  cfg.steps = 0;
  const double before = detectors::stfpm_mean_loss(detectors::stfpm_train(train, spec, cfg), train);
  cfg.steps = 50;
  const double after = detectors::stfpm_mean_loss(detectors::stfpm_train(train, spec, cfg), train);
  ck.expect(after < before, "loss after 50 steps " + fmt(after, 6) + " vs initial " + fmt(before, 6));

  const double secs = seconds_since(t0);
  ck.expect(secs < 60.0, "runtime " + fmt(secs) + " s");
  return ck.outcome(std::to_string(probes) + " probes, max rel err " + fmt(worst) + ", loss " + fmt(before, 5) +
                    " -> " + fmt(after, 5) + ", " + fmt(secs) + " s");
}

// ---- SNR round trip

Outcome snr_round_trip() {
  Checks ck;
  std::mt19937_64 rng(17);
  const audio::ClipKind bgs[] = {audio::ClipKind::tonal_background, audio::ClipKind::noise_background};
  const audio::ClipKind ans[] = {audio::ClipKind::chirp_anomaly, audio::ClipKind::click_anomaly,
                                 audio::ClipKind::tone_burst_anomaly};
  double worst = 0.0;
  std::size_t clipped = 0;
  for (int i = 0; i < 30; ++i) {
    auto bg = audio::synth_clip(bgs[i % 2], 2.0, rng());
    auto an = audio::synth_clip(ans[i % 3], 0.2 + 0.1 * (i % 5), rng());
    // Impulsive anomalies need a large gain at +6 dB; peak 0.025 keeps every mix
    // inside [-1, 1] so the mixture itself can be measured.
    for (double& s : bg.samples) s *= 0.05;
    for (double& s : an.samples) s *= 0.05;
    const std::size_t start = rng() % (bg.size() - an.size());
    for (double target : {-6.0, 0.0, 6.0}) {
      const auto r = audio::mix_at_snr(bg, an, target, start);
      clipped += r.record.clip_count;
      // The anomaly actually present in the mixture: mixed minus background.
      double pa = 0.0, pb = 0.0;
      for (std::size_t n = start; n < start + an.size(); ++n) {
        const double a = r.mixed.samples[n] - bg.samples[n];
        pa += a * a;
        pb += bg.samples[n] * bg.samples[n];
      }
      const double measured = 10.0 * std::log10(pa / pb);
      worst = std::max(worst, std::abs(measured - target));
    }
  }
  ck.expect(worst <= 0.05, "worst deviation " + fmt(worst) + " dB");
  ck.expect(clipped == 0, std::to_string(clipped) + " clipped samples");
  return ck.outcome("90 mixes, worst deviation " + fmt(worst) + " dB, " + std::to_string(clipped) +
                    " clipped samples");
}

// ---- metric formula conformance

Matrix<double> mat(std::size_t r, std::size_t c, std::vector<double> v) {
  Matrix<double> m(r, c);
  std::copy(v.begin(), v.end(), m.data().begin());
  return m;
}

Outcome metric_conformance() {
  using namespace aad::metrics;
  using Scores = std::vector<double>;
  using Labels = std::vector<std::uint8_t>;
  Checks ck;

  const Scores five{1, 2, 3, 4, 5};
  ck.expect(std::abs(percentile(five, 40) - 2.6) <= 1e-12, "percentile {1..5} q40 = 2.6");
  ck.expect(percentile(Scores{7.5}, 0) == 7.5 && percentile(Scores{7.5}, 63) == 7.5 && percentile(Scores{7.5}, 100) == 7.5,
            "percentile singleton");
  ck.expect(percentile(five, 50) == 3.0, "percentile median");
  ck.expect_error([] { percentile(Scores{}, 50); }, Errc::data, "percentile empty");

  ck.expect(roc_auc(Scores{0.1, 0.2, 0.8, 0.9}, Labels{0, 0, 1, 1}) == 1.0, "roc separated");
  ck.expect(roc_auc(Scores{0.4, 0.4, 0.4, 0.4}, Labels{0, 1, 0, 1}) == 0.5, "roc all ties");
  ck.expect(roc_auc(Scores{0.1, 0.4, 0.35, 0.8}, Labels{0, 0, 1, 1}) == 0.75, "roc 0.75 case");
  ck.expect_error([] { roc_auc(Scores{0.1, 0.2}, Labels{1, 1}); }, Errc::metric_undefined, "roc single class");

  ck.expect(best_f1(Scores{0.9, 0.8, 0.2, 0.1}, Labels{1, 1, 0, 0}).f1 == 1.0, "best_f1 separable");
  ck.expect(std::abs(best_f1(Scores{0.9, 0.4, 0.6, 0.1}, Labels{1, 0, 0, 1}).f1 - 2.0 / 3.0) <= 1e-15,
            "best_f1 2/3 case");
  ck.expect_error([] { best_f1(Scores{0.3, 0.2}, Labels{1, 1}); }, Errc::metric_undefined, "best_f1 all positive");

  {
    const auto spec = mat(2, 5, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    const auto g = spect_ground_truth(spec, {0, 2, 0, 5});
    bool ok = g.count() == 4;
    for (std::size_t i = 0; i < 10; ++i) ok = ok && (g.values.data()[i] == (spec.data()[i] >= 7.0));
    ck.expect(ok, "gt marks {7,8,9,10}");
    const auto u = spect_ground_truth(Matrix<double>(3, 4, 2.5), {0, 3, 1, 3});
    ck.expect(u.count() == 6, "gt uniform region fully marked");
    ck.expect(spect_ground_truth(spec, {1, 2, 3, 4}).count() == 1 && spect_ground_truth(spec, {1, 2, 3, 4}).values(1, 3) == 1,
              "gt single cell marked");
    ck.expect_error([&] { spect_ground_truth(spec, {1, 1, 0, 5}); }, Errc::parameter, "gt empty region");
  }
  {
    ck.expect(spect_prediction(Matrix<double>(3, 3, 0.7)).count() == 0, "prediction constant map empty");
    const auto m = mat(1, 5, {0.0, 0.25, 0.5, 0.75, 1.0});
    const auto p = spect_prediction(m);
    ck.expect(p.count() == 3 && p.values(0, 2) == 1 && p.values(0, 1) == 0, "prediction p40 marks 3 cells");
    auto rescaled = m;
    for (double& v : rescaled.data()) v = std::exp(3.0 * v) - 7.0;
    ck.expect(spect_prediction(rescaled).values == p.values, "prediction invariant to monotone rescale");
  }
  {
    const metrics::BinaryMask gt{Matrix<std::uint8_t>(4, 4, 0), MaskRole::ground_truth};
    auto g = gt;
    g.values(1, 1) = g.values(1, 2) = g.values(2, 1) = g.values(3, 3) = 1;
    Matrix<double> perfect(4, 4, 0.0);
    for (std::size_t i = 0; i < 16; ++i) perfect.data()[i] = g.values.data()[i];
    const std::vector<Matrix<double>> maps{perfect};
    const std::vector<BinaryMask> gts{g};
    const auto r = spect_level_metrics(maps, gts);
    ck.expect(r.f1 == 1.0 && r.roc == 1.0 && std::abs(r.pro - 1.0) <= 1e-12, "perfect map gives F1 = ROC = PRO = 1");
    const std::vector<BinaryMask> none{gt};
    ck.expect_error([&] { spect_level_metrics(maps, none); }, Errc::metric_undefined, "no gt cells");
    std::vector<BinaryMask> corner{{Matrix<std::uint8_t>(2, 2, 0), MaskRole::ground_truth}};
    corner[0].values(0, 0) = 1;
    const std::vector<Matrix<double>> late{mat(2, 2, {0.25, 0.1, 0.2, 0.3})};
    const std::vector<Matrix<double>> early{mat(2, 2, {0.9, 0.1, 0.2, 0.3})};
    ck.expect(std::abs(au_pro(late, corner, 0.3)) <= 1e-12, "AU-PRO 2x2 late case = 0");
    ck.expect(std::abs(au_pro(early, corner, 0.3) - 1.0) <= 1e-12, "AU-PRO 2x2 early case = 1");
  }
  {
    auto a = Matrix<double>(4, 2, 0.0);
    a(1, 0) = a(1, 1) = 1.5;  // sum 3
    a(2, 0) = 2.0;
    a(2, 1) = 3.0;  // sum 5
    const auto g = temporal_ground_truth(a, 1, 3);
    ck.expect(g == std::vector<std::uint8_t>{0, 0, 1, 0}, "temporal {3,5} marks only the 5 column");
    ck.expect(temporal_ground_truth(Matrix<double>(6, 3, 1.0), 1, 5) == std::vector<std::uint8_t>(6, 0),
              "temporal uniform marks none");
    ck.expect(temporal_ground_truth(a, 2, 3) == std::vector<std::uint8_t>(4, 0), "temporal single column unmarked");
    ck.expect_error([&] { temporal_ground_truth(a, 2, 2); }, Errc::parameter, "temporal empty interval");
  }
  {
    const auto s = temporal_scores(mat(1, 6, {0.1, 0.9, 0.5, 0.7, 0.3, 0.2}));
    ck.expect(std::abs(s[0] - 0.52) <= 1e-12, "temporal top-5 mean 0.52");
    ck.expect(temporal_scores(Matrix<double>(1, 9, 1.25))[0] == 1.25, "temporal constant column");
    ck.expect(temporal_scores(mat(1, 3, {1, 2, 6}))[0] == 3.0, "temporal fewer than 5 values");
  }
  {
    const SpectrogramScorer f = [](const Matrix<double>& x) {
      double s = 0.0;
      for (double v : x.data()) s += std::abs(v - 0.5);
      return s;
    };
    std::mt19937_64 rng(9);
    Matrix<double> x(6, 5), bg(6, 5);
    for (double& v : x.data()) v = std::normal_distribution<double>()(rng);
    for (double& v : bg.data()) v = std::normal_distribution<double>()(rng);
    ck.expect(faithfulness(f, x, Matrix<double>(6, 5, 1.0), bg).ff_v1 == 0.0, "FF v1 with M = 1 is 0");
    const auto zero = faithfulness(f, x, Matrix<double>(6, 5, 0.0), bg);
    ck.expect(zero.ff_v2 == 0.0, "FF v2 with M = 0 is 0");
    ck.expect(zero.ff_v1 == f(x) - f(Matrix<double>(6, 5, 0.0)), "FF v1 with M = 0 is f(x) - f(0)");
    ck.expect_error([&] { faithfulness(f, x, Matrix<double>(5, 5, 0.0), bg); }, Errc::shape, "FF shape mismatch");
  }
  return ck.outcome(std::to_string(ck.total()) + " examples");
}

// ---- CLI-driven runs

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("'") + AAD_CLI_PATH + "' " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct BenchRun {
  int exit_code = -1;
  double seconds = 0.0;
  fs::path dir;
};

BenchRun run_bench(const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  const auto t0 = std::chrono::steady_clock::now();
  BenchRun r;
  r.dir = dir;
  r.exit_code = run_cli("bench --seed 7 --out '" + dir.string() + "'", dir.string() + ".log");
  r.seconds = seconds_since(t0);
  return r;
}

const metrics::MetricsRow* find_row(const metrics::MetricsReport& rep, const std::string& method, double snr) {
  for (const auto& r : rep.rows)
    if (r.method == method && r.snr_db == snr) return &r;
  return nullptr;
}

Outcome end_to_end(const BenchRun& run) {
  Checks ck;
  ck.expect(run.exit_code == 0, "bench exit code " + std::to_string(run.exit_code));
  if (run.exit_code != 0) return ck.outcome("see " + run.dir.string() + ".log");
  const auto rep = bench::read_report(run.dir / "report.json");
  std::string summary;
  for (const std::string method : {"patchcore", "padim"}) {
    const auto* hi = find_row(rep, method, 6.0);
    const auto* lo = find_row(rep, method, -6.0);
    ck.expect(hi && lo, method + " rows present");
    if (!hi || !lo) continue;
    ck.expect(hi->sample_roc >= 0.90, method + " sample AUROC at +6 dB = " + fmt(hi->sample_roc));
    ck.expect(hi->sample_roc >= lo->sample_roc, method + " +6 dB below -6 dB");
    summary += method + " sample ROC +6/-6 = " + fmt(hi->sample_roc) + "/" + fmt(lo->sample_roc) + ", ";
    if (method == "patchcore") {
      ck.expect(hi->temp_roc >= 0.80, "patchcore temporal AUROC at +6 dB = " + fmt(hi->temp_roc));
      summary += "patchcore temporal ROC +6 = " + fmt(hi->temp_roc) + ", ";
    }
  }
  ck.expect(run.seconds < 300.0, "runtime " + fmt(run.seconds) + " s");
  return ck.outcome(summary + fmt(run.seconds) + " s");
}

Outcome report_shape(const BenchRun& run) {
  Checks ck;
  const auto bytes = read_file(run.dir / "report.csv");
  const std::string csv(bytes.begin(), bytes.end());
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  std::vector<std::string> cols;
  for (std::size_t a = 0, b; a <= header.size(); a = b + 1) {
    b = header.find(',', a);
    if (b == std::string::npos) b = header.size();
    cols.push_back(header.substr(a, b - a));
  }
  for (const char* need : {"sample_roc", "sample_f1", "spect_f1", "spect_pro", "spect_roc", "temp_f1", "temp_roc",
                           "ff_v1_mean", "ff_v1_std", "ff_v2_mean", "ff_v2_std"})
    ck.expect(std::find(cols.begin(), cols.end(), need) != cols.end(), std::string("column ") + need);
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line); ++rows)
    ck.expect(static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1 == cols.size(),
              "row width " + line);
  ck.expect(rows == 9, std::to_string(rows) + " rows, expected 3 methods x 3 SNRs");
  return ck.outcome(std::to_string(cols.size()) + " columns, " + std::to_string(rows) + " rows");
}

Outcome determinism(const BenchRun& first, const BenchRun& second) {
  Checks ck;
  ck.expect(first.exit_code == 0 && second.exit_code == 0, "both bench runs succeed");
  if (!ck.outcome("").pass) return ck.outcome("");
  ck.expect(read_file(first.dir / "report.csv") == read_file(second.dir / "report.csv"), "report.csv bytes differ");
  std::size_t models = 0;
  for (const auto& e : fs::directory_iterator(first.dir / "models")) {
    const auto other = second.dir / "models" / e.path().filename();
    const auto a = read_file(e.path());
    ck.expect(fs::exists(other) && crc32(a) == crc32(read_file(other)),
              e.path().filename().string() + " CRC differs");
    ++models;
  }
  ck.expect(models == 3, std::to_string(models) + " model files");
  return ck.outcome("report.csv identical, " + std::to_string(models) + " model CRCs identical");
}

}  // namespace

int main() {
  const fs::path work = AAD_ACCEPTANCE_DIR;
  fs::create_directories(work);
  int failed = 0;
  auto report = [&](const std::string& name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS  " : "FAIL  ") << name << ": " << o.detail << std::endl;
  };

  report("oracle-equivalence", oracle_equivalence);
  report("stfpm-gradient-check", stfpm_gradient);
  report("snr-round-trip", snr_round_trip);
  report("metric-formula-conformance", metric_conformance);

  const auto first = run_bench(work / "bench_a");
  report("end-to-end-desk-benchmark", [&] { return end_to_end(first); });
  report("report-shape-parity", [&] { return report_shape(first); });
  const auto second = run_bench(work / "bench_b");
  report("determinism", [&] { return determinism(first, second); });

  std::cout << (failed ? "FAILED: " + std::to_string(failed) + " criteria" : std::string("ALL CRITERIA PASSED"))
            << std::endl;
  return failed ? 1 : 0;
}
