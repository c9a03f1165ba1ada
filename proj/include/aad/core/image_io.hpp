#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>

#include "aad/core/binary.hpp"
#include "aad/core/tensor.hpp"

namespace aad {

// Binary PGM (P5, maxval 255). `img` rows are image rows, top first.
inline std::vector<std::uint8_t> encode_pgm(const Matrix<std::uint8_t>& img) {
  const std::string header =
      "P5\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.data().begin(), img.data().end());
  return out;
}

inline Matrix<std::uint8_t> decode_pgm(std::span<const std::uint8_t> b, const std::string& path = {}) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < b.size()) {
      if (b[pos] == '#') {
        while (pos < b.size() && b[pos] != '\n') ++pos;
      } else if (std::isspace(b[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&] {
    skip_ws();
    const std::size_t start = pos;
    std::size_t v = 0;
    while (pos < b.size() && b[pos] >= '0' && b[pos] <= '9') {
      v = v * 10 + (b[pos] - '0');
      if (v > (1u << 24)) throw FormatError("PGM dimension overflow", start, path);
      ++pos;
    }
    if (pos == start) throw FormatError("expected a number in PGM header", pos, path);
    return v;
  };
  if (b.size() < 2 || b[0] != 'P' || b[1] != '5') throw FormatError("bad magic, expected P5", 0, path);
  pos = 2;
  const std::size_t w = number(), h = number(), maxval = number();
  if (maxval != 255) throw FormatError("only maxval 255 is supported", pos, path);
  if (pos >= b.size() || !std::isspace(b[pos])) throw FormatError("malformed PGM header", pos, path);
  ++pos;
  if (b.size() - pos < w * h) throw FormatError("truncated PGM pixel data", pos, path);
  Matrix<std::uint8_t> img(h, w);
  std::copy_n(b.begin() + static_cast<std::ptrdiff_t>(pos), w * h, img.data().begin());
  return img;
}

inline void write_pgm(const std::filesystem::path& path, const Matrix<std::uint8_t>& img) {
  write_file(path, encode_pgm(img));
}

inline Matrix<std::uint8_t> read_pgm(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_pgm(bytes, path.string());
}

// Time x frequency data -> image with time on the x axis and the highest band
// on the top row.
template <typename T>
Matrix<T> to_image_layout(const Matrix<T>& tf) {
  Matrix<T> img(tf.cols(), tf.rows());
  for (std::size_t t = 0; t < tf.rows(); ++t)
    for (std::size_t f = 0; f < tf.cols(); ++f) img(tf.cols() - 1 - f, t) = tf(t, f);
  return img;
}

template <typename T>
Matrix<T> from_image_layout(const Matrix<T>& img) {
  Matrix<T> tf(img.cols(), img.rows());
  for (std::size_t t = 0; t < tf.rows(); ++t)
    for (std::size_t f = 0; f < tf.cols(); ++f) tf(t, f) = img(img.rows() - 1 - f, t);
  return tf;
}

// Min-max scaling to 0..255; constant input maps to 0.
inline Matrix<std::uint8_t> to_gray(const Matrix<double>& m) {
  Matrix<std::uint8_t> out(m.rows(), m.cols(), 0);
  if (m.empty()) return out;
  const auto [lo, hi] = std::minmax_element(m.data().begin(), m.data().end());
  const double range = *hi - *lo;
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < m.size(); ++i)
    out.data()[i] = static_cast<std::uint8_t>(std::lround(255.0 * (m.data()[i] - *lo) / range));
  return out;
}

// AFM1: "AFM1", u32 rows, u32 cols, rows*cols float32 row-major, CRC32.
inline std::vector<std::uint8_t> encode_matrix(const Matrix<double>& m) {
  ByteWriter w;
  w.bytes("AFM1");
  w.u32(static_cast<std::uint32_t>(m.rows()));
  w.u32(static_cast<std::uint32_t>(m.cols()));
  for (double v : m.data()) w.f32(static_cast<float>(v));
  w.seal();
  return w.buffer();
}

inline Matrix<double> decode_matrix(std::span<const std::uint8_t> bytes, const std::string& path = {}) {
  ByteReader r(bytes, path);
  r.expect_magic("AFM1");
  const std::uint64_t rows = r.u32(), cols = r.u32();
  if (rows * cols * 4 > r.payload_remaining()) r.error("truncated matrix data");
  Matrix<double> m(rows, cols);
  for (double& v : m.data()) v = r.f32();
  if (r.remaining() != 4) r.error("unexpected trailing bytes");
  r.verify_crc();
  return m;
}

inline void write_matrix(const std::filesystem::path& path, const Matrix<double>& m) {
  write_file(path, encode_matrix(m));
}

inline Matrix<double> read_matrix(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_matrix(bytes, path.string());
}

// Rounds every value to float32, matching what AFM1 stores.
inline Matrix<double> round_to_f32(Matrix<double> m) {
  for (double& v : m.data()) v = static_cast<double>(static_cast<float>(v));
  return m;
}

}  // namespace aad
