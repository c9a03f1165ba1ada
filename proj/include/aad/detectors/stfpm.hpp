#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "aad/detectors/anomaly_map.hpp"
#include "aad/features/align.hpp"
#include "aad/features/reference_extractor.hpp"

namespace aad::detectors {

struct StfpmConfig {
  std::size_t steps = 500;
  double lr = 0.01;
  double momentum = 0.9;
  std::uint64_t seed = 1;
  std::size_t batch_size = 1;

  friend bool operator==(const StfpmConfig&, const StfpmConfig&) = default;
};

inline constexpr double kNormFloor = 1e-12;

// Student network mirroring the teacher's blocks up to the deepest selected
// level.
struct StudentModel {
  features::ExtractorSpec teacher;
  features::ConvNet student;
  StfpmConfig config;
  std::vector<double> loss_history;  // mean batch loss before each step

  friend bool operator==(const StudentModel& a, const StudentModel& b) {
    return a.teacher == b.teacher && a.student == b.student && a.config == b.config;
  }
};

namespace detail {

inline std::vector<std::size_t> selected_blocks(const features::ExtractorSpec& spec) {
  std::vector<std::size_t> out;
  for (const auto& name : spec.selected_levels)
    for (std::size_t b = 0; b < spec.channels_per_block.size(); ++b)
      if (features::level_name(b) == name) out.push_back(b);
  return out;
}

// 0.5 * ||t/|t| - s/|s|||^2 per position, plus dLoss/ds when `grad` is given
// (scaled by `weight`). Norms are floored at kNormFloor.
inline Matrix<double> feature_distance(const Tensor3<double>& t, const Tensor3<double>& s,
                                       Tensor3<double>* grad = nullptr, double weight = 1.0) {
  require(t.same_shape(s), Errc::architecture, "teacher and student outputs differ in shape");
  const std::size_t c = t.channels();
  Matrix<double> out(t.height(), t.width());
  std::vector<double> th(c), sh(c);
  for (std::size_t p = 0; p < t.positions(); ++p) {
    const auto tv = t.vec(p);
    const auto sv = s.vec(p);
    double tn = 0.0, sn = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      tn += tv[k] * tv[k];
      sn += sv[k] * sv[k];
    }
    tn = std::sqrt(tn);
    sn = std::sqrt(sn);
    const bool s_floored = sn < kNormFloor;
    tn = std::max(tn, kNormFloor);
    sn = std::max(sn, kNormFloor);
    double d = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      th[k] = tv[k] / tn;
      sh[k] = sv[k] / sn;
      d += (sh[k] - th[k]) * (sh[k] - th[k]);
    }
    out.data()[p] = 0.5 * d;
    if (grad) {
      // e = s_hat - t_hat; d/ds = (e - s_hat (s_hat . e)) / |s|
      double proj = 0.0;
      if (!s_floored)
        for (std::size_t k = 0; k < c; ++k) proj += sh[k] * (sh[k] - th[k]);
      auto g = grad->vec(p / t.width(), p % t.width());
      for (std::size_t k = 0; k < c; ++k)
        g[k] += weight * ((sh[k] - th[k]) - sh[k] * proj) / sn;
    }
  }
  return out;
}

}  // namespace detail

// Teacher activations for the selected blocks of one spectrogram.
struct TeacherFeatures {
  std::vector<Tensor3<double>> by_block;  // indexed by block; unselected left empty
};

inline TeacherFeatures teacher_features(const features::ConvNet& teacher, const Matrix<double>& input,
                                        std::size_t n_blocks) {
  auto tr = teacher.forward(features::as_image(input), n_blocks);
  return {std::move(tr.outputs)};
}

// Loss for one input and (optionally) its gradient w.r.t. student parameters.
inline double stfpm_loss(const features::ConvNet& student, const Matrix<double>& input,
                         const TeacherFeatures& teacher, const std::vector<std::size_t>& levels,
                         features::ConvGrad* grad) {
  require(!levels.empty(), Errc::architecture, "no selected levels");
  const std::size_t n_blocks = *std::max_element(levels.begin(), levels.end()) + 1;
  const auto tr = student.forward(features::as_image(input), n_blocks);
  std::vector<Tensor3<double>> d_out;
  if (grad)
    for (const auto& o : tr.outputs) d_out.emplace_back(o.height(), o.width(), o.channels());
  double loss = 0.0;
  for (std::size_t b : levels) {
    const auto& t = teacher.by_block.at(b);
    const double w = 1.0 / (static_cast<double>(levels.size()) * static_cast<double>(t.positions()));
    const auto dist = detail::feature_distance(t, tr.outputs[b], grad ? &d_out[b] : nullptr, w);
    loss += w * std::accumulate(dist.data().begin(), dist.data().end(), 0.0);
  }
  if (grad) *grad = student.backward(tr, std::move(d_out));
  return loss;
}

// Mean loss over a set of inputs, for monitoring.
inline double stfpm_mean_loss(const StudentModel& m, std::span<const Matrix<double>> inputs) {
  const features::ReferenceExtractor teacher(m.teacher);
  const auto levels = detail::selected_blocks(m.teacher);
  const std::size_t n_blocks = *std::max_element(levels.begin(), levels.end()) + 1;
  double acc = 0.0;
  for (const auto& x : inputs)
    acc += stfpm_loss(m.student, x, teacher_features(teacher.net(), x, n_blocks), levels, nullptr);
  return acc / static_cast<double>(inputs.size());
}

inline features::ConvNet init_student(const features::ExtractorSpec& teacher, std::uint64_t seed) {
  const auto levels = detail::selected_blocks(teacher);
  const std::size_t n_blocks = *std::max_element(levels.begin(), levels.end()) + 1;
  std::vector<std::size_t> channels(teacher.channels_per_block.begin(),
                                    teacher.channels_per_block.begin() + static_cast<std::ptrdiff_t>(n_blocks));
  return features::ConvNet::he_init(channels, seed);
}

// SGD with momentum (v = mu * v + g; w -= lr * v) on the mean batch loss.
// Batches are drawn from a seeded per-epoch shuffle.
inline StudentModel stfpm_train(std::span<const Matrix<double>> train,
                                const features::ExtractorSpec& teacher_spec, const StfpmConfig& cfg,
                                const features::ConvNet* initial_student = nullptr) {
  require(!train.empty(), Errc::data, "STFPM needs at least one training spectrogram");
  require(cfg.batch_size >= 1, Errc::parameter, "batch size must be >= 1");
  require(cfg.lr > 0.0 && cfg.momentum >= 0.0 && cfg.momentum < 1.0, Errc::parameter,
          "need lr > 0 and 0 <= momentum < 1");
  for (const auto& x : train)
    require(x.rows() >= features::kMinExtractorInput && x.cols() >= features::kMinExtractorInput,
            Errc::size, "training spectrogram smaller than 8x8");

  const features::ReferenceExtractor teacher(teacher_spec);
  const auto levels = detail::selected_blocks(teacher_spec);
  const std::size_t n_blocks = *std::max_element(levels.begin(), levels.end()) + 1;

  StudentModel m;
  m.teacher = teacher_spec;
  m.config = cfg;
  m.student = initial_student ? *initial_student : init_student(teacher_spec, cfg.seed);
  require(m.student.depth() >= n_blocks, Errc::architecture, "student is shallower than the teacher levels");

  std::vector<TeacherFeatures> targets;
  targets.reserve(train.size());
  for (const auto& x : train) targets.push_back(teacher_features(teacher.net(), x, n_blocks));

  std::vector<std::vector<double>> vel_w, vel_b;
  for (const auto& blk : m.student.blocks()) {
    vel_w.emplace_back(blk.weight.size(), 0.0);
    vel_b.emplace_back(blk.bias.size(), 0.0);
  }

  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32), 0x57u};
  std::mt19937_64 rng(seq);
  std::vector<std::size_t> order(train.size());
  std::size_t cursor = order.size();

  const std::size_t batch = std::min(cfg.batch_size, train.size());
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    features::ConvGrad total;
    double loss = 0.0;
    for (std::size_t k = 0; k < batch; ++k) {
      if (cursor == order.size()) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      const std::size_t i = order[cursor++];
      features::ConvGrad g;
      loss += stfpm_loss(m.student, train[i], targets[i], levels, &g);
      if (total.weight.empty()) {
        total = std::move(g);
      } else {
        for (std::size_t b = 0; b < g.weight.size(); ++b) {
          for (std::size_t q = 0; q < g.weight[b].size(); ++q) total.weight[b][q] += g.weight[b][q];
          for (std::size_t q = 0; q < g.bias[b].size(); ++q) total.bias[b][q] += g.bias[b][q];
        }
      }
    }
    m.loss_history.push_back(loss / static_cast<double>(batch));
    const double scale = 1.0 / static_cast<double>(batch);
    for (std::size_t b = 0; b < total.weight.size(); ++b) {
      auto& blk = m.student.blocks()[b];
      for (std::size_t q = 0; q < blk.weight.size(); ++q) {
        vel_w[b][q] = cfg.momentum * vel_w[b][q] + scale * total.weight[b][q];
        blk.weight[q] -= cfg.lr * vel_w[b][q];
      }
      for (std::size_t q = 0; q < blk.bias.size(); ++q) {
        vel_b[b][q] = cfg.momentum * vel_b[b][q] + scale * total.bias[b][q];
        blk.bias[q] -= cfg.lr * vel_b[b][q];
      }
    }
  }
  return m;
}

// Per-level feature distances resized to the finest selected level and summed.
inline AnomalyMap stfpm_score(const Matrix<double>& input, const features::ConvNet& teacher,
                              const StudentModel& m) {
  const auto levels = detail::selected_blocks(m.teacher);
  const std::size_t n_blocks = *std::max_element(levels.begin(), levels.end()) + 1;
  require(m.student.depth() >= n_blocks, Errc::architecture, "student is shallower than the teacher levels");
  require(input.rows() >= features::kMinExtractorInput && input.cols() >= features::kMinExtractorInput,
          Errc::size, "spectrogram smaller than 8x8");
  const auto t = teacher.forward(features::as_image(input), n_blocks);
  const auto s = m.student.forward(features::as_image(input), n_blocks);

  std::size_t finest = levels.front();
  for (auto b : levels)
    if (t.outputs[b].positions() > t.outputs[finest].positions()) finest = b;
  const std::size_t h = t.outputs[finest].height(), w = t.outputs[finest].width();

  AnomalyMap m_out;
  m_out.detector = "stfpm";
  m_out.values = Matrix<double>(h, w, 0.0);
  for (auto b : levels) {
    const auto d = detail::feature_distance(t.outputs[b], s.outputs[b]);
    const auto up = features::resize_bilinear(d, h, w);
    for (std::size_t k = 0; k < up.size(); ++k) m_out.values.data()[k] += up.data()[k];
  }
  return m_out;
}

inline AnomalyMap stfpm_score(const Matrix<double>& input, const StudentModel& m) {
  const features::ReferenceExtractor teacher(m.teacher);
  return stfpm_score(input, teacher.net(), m);
}

}  // namespace aad::detectors
