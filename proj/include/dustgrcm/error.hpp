#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dustgrcm {

enum class Errc {
  FileNotFound,
  UnsupportedFormat,
  CorruptFile,
  InvalidLevelCount,
  InvalidConfig,
  NonSquareWindow,
  ImageTooSmall,
  DimensionMismatch,
  EmptyMatrix,
  TooFewSamples,
  DegenerateSet,
  DegenerateFrame,
  ZeroStandard,
  ZeroArea,
  IoError,
  MalformedModelFile,
  VersionMismatch,
  MalformedCsv,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::FileNotFound: return "file not found";
    case Errc::UnsupportedFormat: return "unsupported format";
    case Errc::CorruptFile: return "corrupt file";
    case Errc::InvalidLevelCount: return "invalid level count";
    case Errc::InvalidConfig: return "invalid configuration";
    case Errc::NonSquareWindow: return "non-square window";
    case Errc::ImageTooSmall: return "image too small";
    case Errc::DimensionMismatch: return "dimension mismatch";
    case Errc::EmptyMatrix: return "empty matrix";
    case Errc::TooFewSamples: return "too few samples";
    case Errc::DegenerateSet: return "degenerate set";
    case Errc::DegenerateFrame: return "degenerate frame";
    case Errc::ZeroStandard: return "zero standard concentration";
    case Errc::ZeroArea: return "zero area";
    case Errc::IoError: return "i/o error";
    case Errc::MalformedModelFile: return "malformed model";
    case Errc::VersionMismatch: return "version mismatch";
    case Errc::MalformedCsv: return "malformed csv";
  }
  return "unknown error";
}

/// Exception carrying a machine-checkable error class.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace dustgrcm
