#pragma once

#include <filesystem>
#include <limits>

#include "aad/core/binary.hpp"
#include "aad/features/pyramid.hpp"

namespace aad::features {

// AEP1 layout (little-endian): "AEP1", u32 n_levels, per level u32 H, W, C
// and H*W*C float32 (channel fastest), trailing CRC32 of all preceding bytes.
inline std::vector<std::uint8_t> encode_embeddings(const FeatureMapPyramid& p) {
  ByteWriter w;
  w.bytes("AEP1");
  w.u32(static_cast<std::uint32_t>(p.levels.size()));
  for (const auto& lvl : p.levels) {
    w.u32(static_cast<std::uint32_t>(lvl.height()));
    w.u32(static_cast<std::uint32_t>(lvl.width()));
    w.u32(static_cast<std::uint32_t>(lvl.channels()));
    w.f32s(lvl.data());
  }
  w.seal();
  return w.buffer();
}

// The format stores no source shape; it is set to the first level's H x W.
inline FeatureMapPyramid decode_embeddings(std::span<const std::uint8_t> bytes,
                                           const std::string& path = {}) {
  ByteReader r(bytes, path);
  r.expect_magic("AEP1");
  const std::uint32_t n_levels = r.u32();
  if (n_levels == 0) r.error("embedding file declares zero levels");
  FeatureMapPyramid p;
  for (std::uint32_t l = 0; l < n_levels; ++l) {
    const std::uint64_t h = r.u32(), w = r.u32(), c = r.u32();
    const std::uint64_t count = h * w * c;  // each factor < 2^32, product may still overflow
    if (h != 0 && w != 0 && c != 0 &&
        (count / h / w != c || count > std::numeric_limits<std::size_t>::max() / 4))
      r.error("dimension overflow in level " + std::to_string(l));
    if (count == 0) r.error("level " + std::to_string(l) + " has a zero dimension");
    if (count * 4 > r.payload_remaining())
      r.error("truncated data: level " + std::to_string(l) + " declares " +
              std::to_string(count) + " values");
    Tensor3<float> t(h, w, c);
    r.f32s(t.data());
    p.levels.push_back(std::move(t));
    p.level_names.push_back(level_name(l));
  }
  if (r.remaining() != 4) r.error("unexpected trailing bytes");
  r.verify_crc();
  p.source_rows = p.levels.front().height();
  p.source_cols = p.levels.front().width();
  return p;
}

inline void export_embeddings(const FeatureMapPyramid& p, const std::filesystem::path& path) {
  write_file(path, encode_embeddings(p));
}

inline FeatureMapPyramid import_embeddings(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_embeddings(bytes, path.string());
}

}  // namespace aad::features
