#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "dustgrcm/error.hpp"

namespace dustgrcm {

/// 8-bit grayscale image, row-major.
class GrayImage {
 public:
  GrayImage() = default;

  GrayImage(std::size_t width, std::size_t height, std::uint8_t fill = 0)
      : GrayImage(width, height, std::vector<std::uint8_t>(width * height, fill)) {}

  GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width_ == 0 || height_ == 0) {
      throw Error(Errc::ZeroArea, "image must be at least 1x1");
    }
    if (pixels_.size() != width_ * height_) {
      throw Error(Errc::DimensionMismatch, "pixel count does not match width*height");
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  std::uint8_t at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
  std::uint8_t& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }

  const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }
  std::vector<std::uint8_t>& pixels() noexcept { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Gray image quantized to `gray_levels` levels; every level is below gray_levels.
struct QuantizedImage {
  std::size_t width = 0;
  std::size_t height = 0;
  int gray_levels = 256;
  std::vector<std::uint8_t> levels;

  std::uint8_t at(std::size_t x, std::size_t y) const { return levels[y * width + x]; }

  friend bool operator==(const QuantizedImage&, const QuantizedImage&) = default;
};

inline void check_gray_levels(int gray_levels) {
  if (gray_levels < 1 || gray_levels > 256) {
    throw Error(Errc::InvalidLevelCount,
                "gray levels must be in [1, 256], got " + std::to_string(gray_levels));
  }
}

/// Level for a single pixel: floor(p * L / 256), clamped to L - 1.
inline std::uint8_t quantize_pixel(std::uint8_t pixel, int gray_levels) noexcept {
  const int level = (static_cast<int>(pixel) * gray_levels) / 256;
  return static_cast<std::uint8_t>(std::min(level, gray_levels - 1));
}

inline QuantizedImage quantize_gray(const GrayImage& img, int gray_levels) {
  check_gray_levels(gray_levels);
  QuantizedImage out;
  out.width = img.width();
  out.height = img.height();
  out.gray_levels = gray_levels;
  out.levels.resize(img.size());

  std::uint8_t lut[256];
  for (int p = 0; p < 256; ++p) {
    lut[p] = quantize_pixel(static_cast<std::uint8_t>(p), gray_levels);
  }
  std::transform(img.pixels().begin(), img.pixels().end(), out.levels.begin(),
                 [&lut](std::uint8_t p) { return lut[p]; });
  return out;
}

namespace detail {

// Reads one PNM header token, skipping whitespace and '#' comments.
inline bool read_pnm_token(std::istream& in, std::string& token) {
  token.clear();
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c)) {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  // the single whitespace byte after the last header token has been consumed
  return !token.empty();
}

inline std::size_t parse_header_number(const std::string& token, const std::string& path) {
  if (token.empty() || !std::all_of(token.begin(), token.end(),
                                    [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
    throw Error(Errc::CorruptFile, path + ": bad PGM header field '" + token + "'");
  }
  return static_cast<std::size_t>(std::stoull(token));
}

}  // namespace detail

/// Loads a binary PGM (P5) with maxval <= 255. Pixels are returned exactly as stored.
inline GrayImage load_gray_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(Errc::FileNotFound, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::FileNotFound, path.string());
  }

  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() != 2) {
    throw Error(Errc::CorruptFile, path.string() + ": empty file");
  }
  if (magic[0] != 'P' || magic[1] != '5') {
    if (magic[0] == 'P' && (magic[1] == '6' || magic[1] == '3')) {
      throw Error(Errc::UnsupportedFormat, path.string() + ": color PNM is not accepted");
    }
    throw Error(Errc::UnsupportedFormat, path.string() + ": expected binary PGM (P5)");
  }

  std::string token;
  std::size_t fields[3] = {0, 0, 0};
  for (auto& field : fields) {
    if (!detail::read_pnm_token(in, token)) {
      throw Error(Errc::CorruptFile, path.string() + ": truncated PGM header");
    }
    field = detail::parse_header_number(token, path.string());
  }
  const auto [width, height, maxval] = fields;
  if (maxval == 0 || maxval > 65535) {
    throw Error(Errc::CorruptFile, path.string() + ": invalid maxval");
  }
  if (maxval > 255) {
    throw Error(Errc::UnsupportedFormat, path.string() + ": 16-bit PGM is not accepted");
  }
  if (width == 0 || height == 0) {
    throw Error(Errc::CorruptFile, path.string() + ": zero image dimension");
  }

  std::vector<std::uint8_t> pixels(width * height);
  in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != pixels.size()) {
    throw Error(Errc::CorruptFile, path.string() + ": truncated pixel payload");
  }
  return GrayImage(width, height, std::move(pixels));
}

inline void write_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height,
                      const std::vector<std::uint8_t>& pixels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  }
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) {
    throw Error(Errc::IoError, "write failed for " + path.string());
  }
}

inline void save_gray_image(const std::filesystem::path& path, const GrayImage& img) {
  write_pgm(path, img.width(), img.height(), img.pixels());
}

}  // namespace dustgrcm
