#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aad {

// Error categories surfaced by the library. The CLI maps all of them to exit
// code 1 (user error); anything that is not an aad::Error is internal.
enum class Errc {
  parameter,
  degenerate_signal,
  bounds,
  length,
  size,
  format,
  statistics,
  numerical,
  shape,
  data,
  metric_undefined,
  architecture,
  io,
  config,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::parameter: return "parameter error";
    case Errc::degenerate_signal: return "degenerate-signal error";
    case Errc::bounds: return "bounds error";
    case Errc::length: return "length error";
    case Errc::size: return "size error";
    case Errc::format: return "format error";
    case Errc::statistics: return "statistics error";
    case Errc::numerical: return "numerical error";
    case Errc::shape: return "shape error";
    case Errc::data: return "data error";
    case Errc::metric_undefined: return "metric-undefined error";
    case Errc::architecture: return "architecture error";
    case Errc::io: return "I/O error";
    case Errc::config: return "configuration error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Binary decoding failure; carries the byte offset where decoding stopped.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset,
              const std::string& path = {})
      : Error(Errc::format, describe(what, offset, path)),
        offset_(offset),
        path_(path) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& path() const noexcept { return path_; }

 private:
  static std::string describe(const std::string& what, std::size_t offset,
                              const std::string& path) {
    std::string s = what + " at byte offset " + std::to_string(offset);
    if (!path.empty()) s += " in '" + path + "'";
    return s;
  }

  std::size_t offset_;
  std::string path_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace aad
