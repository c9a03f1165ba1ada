#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace aad::audio {

// Power spectrum |X_k|^2, k = 0..n/2, of a real frame. Radix-2 for power-of-two
// lengths, direct DFT otherwise.
class PowerSpectrum {
 public:
  explicit PowerSpectrum(std::size_t n) : n_(n) {
    pow2_ = n >= 1 && (n & (n - 1)) == 0;
    if (pow2_) {
      twiddle_.resize(n / 2);
      for (std::size_t k = 0; k < n / 2; ++k)
        twiddle_[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / n);
      bitrev_.resize(n);
      std::size_t bits = 0;
      while ((std::size_t{1} << bits) < n) ++bits;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b)
          if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
        bitrev_[i] = r;
      }
    }
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t bins() const noexcept { return n_ / 2 + 1; }

  void operator()(std::span<const double> frame, std::span<double> out) {
    if (!pow2_) return direct(frame, out);
    buf_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) buf_[bitrev_[i]] = {frame[i], 0.0};
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t step = n_ / len;
      for (std::size_t i = 0; i < n_; i += len) {
        for (std::size_t j = 0; j < half; ++j) {
          const auto t = twiddle_[j * step] * buf_[i + j + half];
          buf_[i + j + half] = buf_[i + j] - t;
          buf_[i + j] += t;
        }
      }
    }
    for (std::size_t k = 0; k < bins(); ++k) out[k] = std::norm(buf_[k]);
  }

 private:
  void direct(std::span<const double> frame, std::span<double> out) const {
    for (std::size_t k = 0; k < bins(); ++k) {
      std::complex<double> acc = 0.0;
      for (std::size_t i = 0; i < n_; ++i)
        acc += frame[i] * std::polar(1.0, -2.0 * std::numbers::pi *
                                              static_cast<double>((k * i) % n_) / n_);
      out[k] = std::norm(acc);
    }
  }

  std::size_t n_;
  bool pow2_ = false;
  std::vector<std::complex<double>> twiddle_;
  std::vector<std::size_t> bitrev_;
  std::vector<std::complex<double>> buf_;
};

}  // namespace aad::audio
