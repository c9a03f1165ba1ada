#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "aad/core/error.hpp"
#include "aad/core/tensor.hpp"

namespace aad::features {

// One 3x3 conv (stride 1, reflect padding) -> ReLU -> 2x2 average pool stage.
// Weights are laid out [out][ky][kx][in] so that a gathered 3x3xCin patch is
// a contiguous dot-product operand.
struct ConvBlock {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  std::size_t fan_in() const noexcept { return 9 * in; }
  double* kernel(std::size_t o) { return weight.data() + o * fan_in(); }
  const double* kernel(std::size_t o) const { return weight.data() + o * fan_in(); }
  friend bool operator==(const ConvBlock&, const ConvBlock&) = default;
};

struct ConvGrad {
  std::vector<std::vector<double>> weight;
  std::vector<std::vector<double>> bias;
};

namespace detail {

// Reflect (without edge repeat) for offsets of at most one cell; n >= 2.
inline std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  if (i < 0) return static_cast<std::size_t>(-i);
  if (i >= static_cast<std::ptrdiff_t>(n)) return 2 * n - 2 - static_cast<std::size_t>(i);
  return static_cast<std::size_t>(i);
}

inline void gather_patch(const Tensor3<double>& x, std::size_t i, std::size_t j,
                         std::vector<double>& patch) {
  const std::size_t cin = x.channels();
  std::size_t k = 0;
  for (int dy = -1; dy <= 1; ++dy) {
    const std::size_t r = reflect(static_cast<std::ptrdiff_t>(i) + dy, x.height());
    for (int dx = -1; dx <= 1; ++dx) {
      const std::size_t c = reflect(static_cast<std::ptrdiff_t>(j) + dx, x.width());
      const auto v = x.vec(r, c);
      for (std::size_t ci = 0; ci < cin; ++ci) patch[k++] = v[ci];
    }
  }
}

}  // namespace detail

// Forward activations kept for backpropagation.
struct ConvTrace {
  std::vector<Tensor3<double>> inputs;   // input of block b
  std::vector<Tensor3<double>> preact;   // conv output of block b, before ReLU
  std::vector<Tensor3<double>> outputs;  // pooled output of block b
};

class ConvNet {
 public:
  ConvNet() = default;

  // Variance-scaled (He) normal weights, zero biases.
  static ConvNet he_init(const std::vector<std::size_t>& channels, std::uint64_t seed) {
    ConvNet net;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    std::mt19937_64 rng(seq);
    std::size_t in = 1;
    for (std::size_t out : channels) {
      ConvBlock b;
      b.in = in;
      b.out = out;
      b.weight.resize(out * b.fan_in());
      b.bias.assign(out, 0.0);
      std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(b.fan_in())));
      for (double& w : b.weight) w = dist(rng);
      net.blocks_.push_back(std::move(b));
      in = out;
    }
    return net;
  }

  std::size_t depth() const noexcept { return blocks_.size(); }
  std::vector<ConvBlock>& blocks() noexcept { return blocks_; }
  const std::vector<ConvBlock>& blocks() const noexcept { return blocks_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& b : blocks_) n += b.weight.size() + b.bias.size();
    return n;
  }

  // Runs the first `n_blocks` blocks on a T x F x 1 input.
  ConvTrace forward(const Tensor3<double>& input, std::size_t n_blocks) const {
    require(n_blocks <= blocks_.size(), Errc::architecture, "network has too few blocks");
    ConvTrace tr;
    const Tensor3<double>* x = &input;
    for (std::size_t b = 0; b < n_blocks; ++b) {
      const auto& blk = blocks_[b];
      require(x->channels() == blk.in, Errc::architecture, "channel mismatch entering block");
      require(x->height() >= 2 && x->width() >= 2, Errc::size,
              "feature map too small for 3x3 reflect convolution");
      tr.inputs.push_back(*x);
      Tensor3<double> z(x->height(), x->width(), blk.out);
      std::vector<double> patch(blk.fan_in());
      for (std::size_t i = 0; i < x->height(); ++i)
        for (std::size_t j = 0; j < x->width(); ++j) {
          detail::gather_patch(*x, i, j, patch);
          auto zv = z.vec(i, j);
          for (std::size_t o = 0; o < blk.out; ++o) {
            const double* k = blk.kernel(o);
            double acc = blk.bias[o];
            for (std::size_t q = 0; q < patch.size(); ++q) acc += k[q] * patch[q];
            zv[o] = acc;
          }
        }
      Tensor3<double> pooled(z.height() / 2, z.width() / 2, blk.out);
      for (std::size_t i = 0; i < pooled.height(); ++i)
        for (std::size_t j = 0; j < pooled.width(); ++j)
          for (std::size_t o = 0; o < blk.out; ++o) {
            double s = 0.0;
            for (std::size_t di = 0; di < 2; ++di)
              for (std::size_t dj = 0; dj < 2; ++dj)
                s += std::max(0.0, z(2 * i + di, 2 * j + dj, o));
            pooled(i, j, o) = 0.25 * s;
          }
      tr.preact.push_back(std::move(z));
      tr.outputs.push_back(std::move(pooled));
      x = &tr.outputs.back();
    }
    return tr;
  }

  // Gradients of a loss given dL/d(outputs[b]) for every traced block.
  // `d_outputs` is consumed (upstream gradients are accumulated into it).
  ConvGrad backward(const ConvTrace& tr, std::vector<Tensor3<double>> d_outputs) const {
    const std::size_t n = tr.outputs.size();
    require(d_outputs.size() == n, Errc::architecture, "gradient count does not match trace");
    ConvGrad g;
    g.weight.resize(n);
    g.bias.resize(n);
    for (std::size_t bb = n; bb-- > 0;) {
      const auto& blk = blocks_[bb];
      const auto& x = tr.inputs[bb];
      const auto& z = tr.preact[bb];
      const auto& dp = d_outputs[bb];
      g.weight[bb].assign(blk.weight.size(), 0.0);
      g.bias[bb].assign(blk.out, 0.0);
      const bool need_dx = bb > 0;
      Tensor3<double> dx;
      if (need_dx) dx = Tensor3<double>(x.height(), x.width(), x.channels());

      std::vector<double> patch(blk.fan_in());
      std::vector<double> dpatch(blk.fan_in());
      std::vector<double> dz(blk.out);
      for (std::size_t i = 0; i < z.height(); ++i)
        for (std::size_t j = 0; j < z.width(); ++j) {
          const std::size_t pi = i / 2, pj = j / 2;
          if (pi >= dp.height() || pj >= dp.width()) continue;
          bool any = false;
          for (std::size_t o = 0; o < blk.out; ++o) {
            dz[o] = z(i, j, o) > 0.0 ? 0.25 * dp(pi, pj, o) : 0.0;
            any = any || dz[o] != 0.0;
          }
          if (!any) continue;
          detail::gather_patch(x, i, j, patch);
          if (need_dx) std::fill(dpatch.begin(), dpatch.end(), 0.0);
          for (std::size_t o = 0; o < blk.out; ++o) {
            const double gz = dz[o];
            if (gz == 0.0) continue;
            double* gw = g.weight[bb].data() + o * blk.fan_in();
            for (std::size_t q = 0; q < patch.size(); ++q) gw[q] += gz * patch[q];
            g.bias[bb][o] += gz;
            if (need_dx) {
              const double* k = blk.kernel(o);
              for (std::size_t q = 0; q < dpatch.size(); ++q) dpatch[q] += gz * k[q];
            }
          }
          if (need_dx) {
            std::size_t q = 0;
            for (int dy = -1; dy <= 1; ++dy) {
              const std::size_t r = detail::reflect(static_cast<std::ptrdiff_t>(i) + dy, x.height());
              for (int dxo = -1; dxo <= 1; ++dxo) {
                const std::size_t c = detail::reflect(static_cast<std::ptrdiff_t>(j) + dxo, x.width());
                auto v = dx.vec(r, c);
                for (std::size_t ci = 0; ci < x.channels(); ++ci) v[ci] += dpatch[q++];
              }
            }
          }
        }
      if (need_dx) {
        auto& up = d_outputs[bb - 1];
        for (std::size_t k = 0; k < up.size(); ++k) up.data()[k] += dx.data()[k];
      }
    }
    return g;
  }

  friend bool operator==(const ConvNet&, const ConvNet&) = default;

 private:
  std::vector<ConvBlock> blocks_;
};

inline Tensor3<double> as_image(const Matrix<double>& m) {
  Tensor3<double> t(m.rows(), m.cols(), 1);
  t.data() = m.data();
  return t;
}

}  // namespace aad::features
