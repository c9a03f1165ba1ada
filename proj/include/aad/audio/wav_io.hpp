#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "aad/audio/waveform.hpp"
#include "aad/core/binary.hpp"

namespace aad::audio {

inline constexpr double kPcm16Scale = 32767.0;

inline std::int16_t to_pcm16(double s) {
  const double q = std::round(std::clamp(s, -1.0, 1.0) * kPcm16Scale);
  return static_cast<std::int16_t>(q);
}

// Snaps samples to the PCM16 grid so that write_wav/read_wav is lossless.
inline Waveform quantize_pcm16(Waveform w) {
  for (double& s : w.samples) s = to_pcm16(s) / kPcm16Scale;
  return w;
}

inline std::vector<std::uint8_t> encode_wav(const Waveform& w) {
  const auto n = static_cast<std::uint32_t>(w.samples.size());
  const std::uint32_t data_bytes = n * 2;
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  auto put_u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  auto put_u16 = [&](std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  auto put_tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };

  put_tag("RIFF");
  put_u32(36 + data_bytes);
  put_tag("WAVE");
  put_tag("fmt ");
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(static_cast<std::uint32_t>(w.sample_rate));
  put_u32(static_cast<std::uint32_t>(w.sample_rate) * 2);
  put_u16(2);
  put_u16(16);
  put_tag("data");
  put_u32(data_bytes);
  for (double s : w.samples) put_u16(static_cast<std::uint16_t>(to_pcm16(s)));
  return out;
}

inline void write_wav(const std::filesystem::path& path, const Waveform& w) {
  write_file(path, encode_wav(w));
}

inline Waveform decode_wav(std::span<const std::uint8_t> b, const std::string& path = {}) {
  std::size_t pos = 0;
  auto need = [&](std::size_t n) {
    if (pos + n > b.size()) throw FormatError("truncated WAV", pos, path);
  };
  auto rd_u32 = [&] {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[pos + i]) << (8 * i);
    pos += 4;
    return v;
  };
  auto rd_u16 = [&] {
    need(2);
    const auto v = static_cast<std::uint16_t>(b[pos] | (b[pos + 1] << 8));
    pos += 2;
    return v;
  };
  auto tag = [&](const char* t) {
    need(4);
    const bool ok = std::equal(t, t + 4, b.begin() + static_cast<std::ptrdiff_t>(pos));
    return ok;
  };

  if (!tag("RIFF")) throw FormatError("missing RIFF header", pos, path);
  pos += 4;
  rd_u32();
  if (!tag("WAVE")) throw FormatError("missing WAVE tag", pos, path);
  pos += 4;

  Waveform w;
  bool have_fmt = false;
  while (pos < b.size()) {
    need(8);
    const bool is_fmt = tag("fmt ");
    const bool is_data = tag("data");
    pos += 4;
    const std::uint32_t len = rd_u32();
    const std::size_t chunk_start = pos;
    if (is_fmt) {
      const auto format = rd_u16();
      const auto channels = rd_u16();
      w.sample_rate = static_cast<int>(rd_u32());
      rd_u32();
      rd_u16();
      const auto bits = rd_u16();
      if (format != 1 || channels != 1 || bits != 16)
        throw FormatError("only PCM16 mono WAV is supported", chunk_start, path);
      have_fmt = true;
    } else if (is_data) {
      if (!have_fmt) throw FormatError("data chunk before fmt chunk", chunk_start, path);
      need(len);
      w.samples.resize(len / 2);
      for (auto& s : w.samples) s = static_cast<std::int16_t>(rd_u16()) / kPcm16Scale;
      return w;
    }
    pos = chunk_start + len + (len & 1u);
  }
  throw FormatError("no data chunk", pos, path);
}

inline Waveform read_wav(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_wav(bytes, path.string());
}

}  // namespace aad::audio
