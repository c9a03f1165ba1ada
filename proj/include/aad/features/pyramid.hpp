#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "aad/core/error.hpp"
#include "aad/core/tensor.hpp"

namespace aad::features {

inline std::string level_name(std::size_t index) { return "block" + std::to_string(index + 1); }

// Multi-resolution feature maps, finest first.
struct FeatureMapPyramid {
  std::vector<Tensor3<float>> levels;
  std::vector<std::string> level_names;
  std::size_t source_rows = 0;  // T
  std::size_t source_cols = 0;  // F

  std::size_t index_of(const std::string& name) const {
    const auto it = std::find(level_names.begin(), level_names.end(), name);
    require(it != level_names.end(), Errc::parameter, "unknown feature level '" + name + "'");
    return static_cast<std::size_t>(it - level_names.begin());
  }

  void validate() const {
    require(!levels.empty(), Errc::shape, "pyramid has no levels");
    require(levels.size() == level_names.size(), Errc::shape, "level names do not match levels");
    for (std::size_t l = 0; l < levels.size(); ++l) {
      require(levels[l].size() > 0, Errc::shape, "empty level " + level_names[l]);
      if (l > 0)
        require(levels[l].height() <= levels[l - 1].height() &&
                    levels[l].width() <= levels[l - 1].width(),
                Errc::shape, "level resolutions must be non-increasing");
      for (float v : levels[l].data())
        require(std::isfinite(v), Errc::data, "non-finite value in level " + level_names[l]);
    }
  }

  friend bool operator==(const FeatureMapPyramid&, const FeatureMapPyramid&) = default;
};

// Half-open rectangle of spectrogram cells: rows are frames, cols are bands.
struct CellRect {
  std::size_t row_begin = 0, row_end = 0;
  std::size_t col_begin = 0, col_end = 0;

  bool contains(std::size_t r, std::size_t c) const noexcept {
    return r >= row_begin && r < row_end && c >= col_begin && c < col_end;
  }
  friend bool operator==(const CellRect&, const CellRect&) = default;
};

// Cell rectangles of an H x W patch grid over a T x F spectrogram. Edges are
// floor(h * T / H), so rectangles tile the plane exactly.
inline std::vector<CellRect> make_coord_map(std::size_t h, std::size_t w, std::size_t rows,
                                            std::size_t cols) {
  std::vector<CellRect> out;
  out.reserve(h * w);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j)
      out.push_back({i * rows / h, (i + 1) * rows / h, j * cols / w, (j + 1) * cols / w});
  return out;
}

// H x W grid of C-dimensional patch embeddings plus the cells each covers.
struct PatchGrid {
  Tensor3<float> grid;
  std::vector<CellRect> coord_map;
  std::size_t source_rows = 0;
  std::size_t source_cols = 0;

  std::size_t patch_count() const noexcept { return grid.positions(); }
  std::size_t dim() const noexcept { return grid.channels(); }

  template <typename Fn>
  void for_each_patch(Fn&& fn) const {
    for (std::size_t p = 0; p < grid.positions(); ++p) fn(p, grid.vec(p));
  }
};

enum class ExtractorKind : std::uint8_t { reference = 0, imported = 1 };

struct ExtractorSpec {
  ExtractorKind kind = ExtractorKind::reference;
  std::uint64_t seed = 0;
  std::vector<std::size_t> channels_per_block{16, 32, 64};
  std::vector<std::string> selected_levels{"block1", "block2", "block3"};

  std::size_t deepest_selected() const {
    std::size_t deepest = 0;
    for (const auto& name : selected_levels) {
      std::size_t idx = channels_per_block.size();
      for (std::size_t b = 0; b < channels_per_block.size(); ++b)
        if (level_name(b) == name) idx = b;
      require(idx < channels_per_block.size(), Errc::parameter,
              "selected level '" + name + "' is not produced by the extractor");
      deepest = std::max(deepest, idx);
    }
    return deepest;
  }

  void validate() const {
    require(!selected_levels.empty(), Errc::parameter, "no feature levels selected");
    if (kind == ExtractorKind::reference) {
      require(!channels_per_block.empty(), Errc::parameter, "extractor needs at least one block");
      for (auto c : channels_per_block)
        require(c > 0, Errc::parameter, "block channel count must be positive");
      deepest_selected();
    }
  }

  friend bool operator==(const ExtractorSpec&, const ExtractorSpec&) = default;
};

}  // namespace aad::features
