#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace aad {

// Dense row-major matrix. Spectrograms and anomaly maps are rows = time
// frames, cols = frequency bands.
template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  const T& operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<T>& data() & noexcept { return data_; }
  const std::vector<T>& data() const& noexcept { return data_; }
  std::vector<T> data() && noexcept { return std::move(data_); }

  bool same_shape(const Matrix& o) const noexcept {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// H x W x C tensor, channel fastest. Each (h, w) owns a contiguous C-vector,
// which is the patch embedding at that position.
template <typename T>
class Tensor3 {
 public:
  using value_type = T;

  Tensor3() = default;
  Tensor3(std::size_t h, std::size_t w, std::size_t c, T fill = T{})
      : h_(h), w_(w), c_(c), data_(h * w * c, fill) {}

  std::size_t height() const noexcept { return h_; }
  std::size_t width() const noexcept { return w_; }
  std::size_t channels() const noexcept { return c_; }
  std::size_t positions() const noexcept { return h_ * w_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t h, std::size_t w, std::size_t c) {
    assert(h < h_ && w < w_ && c < c_);
    return data_[(h * w_ + w) * c_ + c];
  }
  const T& operator()(std::size_t h, std::size_t w, std::size_t c) const {
    assert(h < h_ && w < w_ && c < c_);
    return data_[(h * w_ + w) * c_ + c];
  }

  std::span<T> vec(std::size_t h, std::size_t w) {
    return {data_.data() + (h * w_ + w) * c_, c_};
  }
  std::span<const T> vec(std::size_t h, std::size_t w) const {
    return {data_.data() + (h * w_ + w) * c_, c_};
  }
  // Flat position index p = h * W + w.
  std::span<const T> vec(std::size_t p) const {
    return {data_.data() + p * c_, c_};
  }

  std::vector<T>& data() & noexcept { return data_; }
  const std::vector<T>& data() const& noexcept { return data_; }
  std::vector<T> data() && noexcept { return std::move(data_); }

  bool same_shape(const Tensor3& o) const noexcept {
    return h_ == o.h_ && w_ == o.w_ && c_ == o.c_;
  }

  template <typename U>
  Tensor3<U> cast() const {
    Tensor3<U> out(h_, w_, c_);
    std::transform(data_.begin(), data_.end(), out.data().begin(),
                   [](T v) { return static_cast<U>(v); });
    return out;
  }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t h_ = 0;
  std::size_t w_ = 0;
  std::size_t c_ = 0;
  std::vector<T> data_;
};

}  // namespace aad
