#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "aad/features/pyramid.hpp"

namespace aad::features {

namespace detail {

// Half-pixel-center source coordinate for a bilinear resize.
struct Tap {
  std::size_t i0, i1;
  double frac;
};

inline std::vector<Tap> bilinear_taps(std::size_t in, std::size_t out) {
  std::vector<Tap> taps(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t d = 0; d < out; ++d) {
    double src = (static_cast<double>(d) + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const auto i0 = static_cast<std::size_t>(std::floor(src));
    taps[d] = {i0, std::min(i0 + 1, in - 1), src - static_cast<double>(i0)};
  }
  return taps;
}

inline double lerp(double a, double b, double t) { return a + t * (b - a); }

}  // namespace detail

// Bilinear resize (half-pixel centers, edge clamp). Identity when the size is
// unchanged; constants stay exactly constant.
template <typename T>
Tensor3<T> resize_bilinear(const Tensor3<T>& in, std::size_t h, std::size_t w) {
  require(in.height() > 0 && in.width() > 0 && h > 0 && w > 0, Errc::shape,
          "cannot resize an empty map");
  if (in.height() == h && in.width() == w) return in;
  const auto ty = detail::bilinear_taps(in.height(), h);
  const auto tx = detail::bilinear_taps(in.width(), w);
  Tensor3<T> out(h, w, in.channels());
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j)
      for (std::size_t c = 0; c < in.channels(); ++c) {
        const double top = detail::lerp(in(ty[i].i0, tx[j].i0, c), in(ty[i].i0, tx[j].i1, c), tx[j].frac);
        const double bot = detail::lerp(in(ty[i].i1, tx[j].i0, c), in(ty[i].i1, tx[j].i1, c), tx[j].frac);
        out(i, j, c) = static_cast<T>(detail::lerp(top, bot, ty[i].frac));
      }
  return out;
}

template <typename T>
Matrix<T> resize_bilinear(const Matrix<T>& in, std::size_t rows, std::size_t cols) {
  Tensor3<T> t(in.rows(), in.cols(), 1);
  t.data() = in.data();
  auto r = resize_bilinear(t, rows, cols);
  Matrix<T> out(rows, cols);
  out.data() = std::move(r.data());
  return out;
}

// Resizes every selected level to the first selected level's resolution and
// concatenates channels in selection order.
inline PatchGrid align_and_concat(const FeatureMapPyramid& p,
                                  const std::vector<std::string>& selected) {
  require(!selected.empty(), Errc::parameter, "no feature levels selected");
  std::vector<std::size_t> idx;
  for (const auto& name : selected) idx.push_back(p.index_of(name));

  const auto& first = p.levels[idx.front()];
  const std::size_t h = first.height(), w = first.width();
  std::size_t c_total = 0;
  for (auto i : idx) c_total += p.levels[i].channels();

  PatchGrid g;
  g.grid = Tensor3<float>(h, w, c_total);
  std::size_t c_off = 0;
  for (auto i : idx) {
    const auto resized = resize_bilinear(p.levels[i], h, w);
    const std::size_t c = resized.channels();
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) {
        const auto src = resized.vec(y, x);
        std::copy(src.begin(), src.end(), g.grid.vec(y, x).begin() + static_cast<std::ptrdiff_t>(c_off));
      }
    c_off += c;
  }
  g.source_rows = p.source_rows ? p.source_rows : h;
  g.source_cols = p.source_cols ? p.source_cols : w;
  g.coord_map = make_coord_map(h, w, g.source_rows, g.source_cols);
  return g;
}

}  // namespace aad::features
