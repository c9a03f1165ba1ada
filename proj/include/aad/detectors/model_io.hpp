#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>

#include "aad/core/binary.hpp"
#include "aad/detectors/config_json.hpp"

namespace aad::detectors {

// AVDM layout: "AVDM", u8 detector id, then the payload, then CRC32 of all
// preceding bytes. Every payload starts with a length-prefixed JSON string
// holding the detector and pipeline configuration; numeric arrays follow as
// u32 / float32, little-endian.
//   padim:     u32 H, W, C; mean[H*W*C]; precision[H*W*C*C]
//   patchcore: u32 N, C, source_count; coreset[N*C]
//   stfpm:     u32 n_blocks; per block u32 in, out; weight[out*9*in]; bias[out]
// Loading rounds model arrays to float32 precision.
namespace detail {

template <typename Range>
void put_f32(ByteWriter& w, const Range& values) {
  for (auto v : values) w.f32(static_cast<float>(v));
}

inline void get_f32(ByteReader& r, std::vector<double>& out, std::size_t n) {
  r.need(n * 4, "float32 block");
  out.resize(n);
  for (double& v : out) v = r.f32();
}

inline std::size_t checked_count(ByteReader& r, std::initializer_list<std::uint64_t> dims) {
  std::uint64_t n = 1;
  for (auto d : dims) {
    if (d != 0 && n > (std::uint64_t{1} << 60) / d) r.error("dimension overflow");
    n *= d;
  }
  if (n * 4 > r.payload_remaining()) r.error("truncated data: declared array exceeds file size");
  return static_cast<std::size_t>(n);
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_model(const Detector& d) {
  ByteWriter w;
  w.bytes("AVDM");
  w.u8(static_cast<std::uint8_t>(d.kind()));
  const nlohmann::json header = {{"detector", d.config()}, {"pipeline", d.pipeline()}};
  w.str(header.dump());
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, GaussianField>) {
          w.u32(static_cast<std::uint32_t>(m.height));
          w.u32(static_cast<std::uint32_t>(m.width));
          w.u32(static_cast<std::uint32_t>(m.dim));
          detail::put_f32(w, m.mean);
          detail::put_f32(w, m.precision);
        } else if constexpr (std::is_same_v<M, MemoryBank>) {
          w.u32(static_cast<std::uint32_t>(m.coreset.rows()));
          w.u32(static_cast<std::uint32_t>(m.coreset.cols()));
          w.u32(static_cast<std::uint32_t>(m.source_count));
          w.f32s(m.coreset.data());
        } else {
          w.u32(static_cast<std::uint32_t>(m.student.depth()));
          for (const auto& b : m.student.blocks()) {
            w.u32(static_cast<std::uint32_t>(b.in));
            w.u32(static_cast<std::uint32_t>(b.out));
            detail::put_f32(w, b.weight);
            detail::put_f32(w, b.bias);
          }
        }
      },
      d.model());
  w.seal();
  return w.buffer();
}

inline Detector decode_model(std::span<const std::uint8_t> bytes, const std::string& path = {}) {
  ByteReader r(bytes, path);
  r.expect_magic("AVDM");
  const std::uint8_t id = r.u8();
  if (id < 1 || id > 3) r.error("unknown detector id " + std::to_string(id));
  const auto kind = static_cast<DetectorKind>(id);

  const std::size_t header_at = r.offset();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(r.str());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad model header: ") + e.what(), header_at, path);
  }
  DetectorConfig cfg;
  PipelineConfig pipeline;
  try {
    cfg = header.at("detector").get<DetectorConfig>();
    pipeline = header.at("pipeline").get<PipelineConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad model header: ") + e.what(), header_at, path);
  }
  if (cfg.kind != kind) throw FormatError("detector id disagrees with header", header_at, path);

  DetectorModel model;
  switch (kind) {
    case DetectorKind::padim: {
      GaussianField f;
      f.height = r.u32();
      f.width = r.u32();
      f.dim = r.u32();
      f.epsilon = cfg.padim_epsilon;
      const auto n_mean = detail::checked_count(r, {f.height, f.width, f.dim});
      detail::get_f32(r, f.mean, n_mean);
      const auto n_prec = detail::checked_count(r, {f.height, f.width, f.dim, f.dim});
      detail::get_f32(r, f.precision, n_prec);
      model = std::move(f);
      break;
    }
    case DetectorKind::patchcore: {
      MemoryBank b;
      const std::uint32_t n = r.u32(), c = r.u32();
      b.source_count = r.u32();
      b.fraction = cfg.coreset_fraction;
      const auto count = detail::checked_count(r, {n, c});
      if (count == 0) r.error("empty memory bank");
      b.coreset = Matrix<float>(n, c);
      r.f32s(b.coreset.data());
      model = std::move(b);
      break;
    }
    case DetectorKind::stfpm: {
      StudentModel s;
      s.teacher = pipeline.extractor;
      s.config = cfg.stfpm;
      const std::uint32_t depth = r.u32();
      if (depth == 0 || depth > 64) r.error("implausible block count " + std::to_string(depth));
      for (std::uint32_t b = 0; b < depth; ++b) {
        features::ConvBlock blk;
        blk.in = r.u32();
        blk.out = r.u32();
        detail::get_f32(r, blk.weight, detail::checked_count(r, {blk.out, 9, blk.in}));
        detail::get_f32(r, blk.bias, detail::checked_count(r, {blk.out}));
        s.student.blocks().push_back(std::move(blk));
      }
      model = std::move(s);
      break;
    }
  }
  if (r.remaining() != 4) r.error("unexpected trailing bytes");
  r.verify_crc();
  return Detector(cfg, pipeline, std::move(model));
}

inline void save_model(const Detector& d, const std::filesystem::path& path) {
  write_file(path, encode_model(d));
}

inline Detector load_model(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_model(bytes, path.string());
}

}  // namespace aad::detectors
