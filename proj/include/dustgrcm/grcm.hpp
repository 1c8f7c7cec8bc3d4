#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dustgrcm/error.hpp"
#include "dustgrcm/imaging.hpp"
#include "dustgrcm/rank.hpp"

namespace dustgrcm {

/// Gray level-rank co-occurrence counts, dense gray_levels x rank_levels, row-major
/// (row i = gray level, column j = rank level).
struct Grcm {
  int gray_levels = 0;
  int rank_levels = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  std::uint64_t at(int i, int j) const { return counts[static_cast<std::size_t>(i) * rank_levels + j]; }

  friend bool operator==(const Grcm&, const Grcm&) = default;
};

struct GrcmProbability {
  int gray_levels = 0;
  int rank_levels = 0;
  std::vector<double> probs;

  double at(int i, int j) const { return probs[static_cast<std::size_t>(i) * rank_levels + j]; }
};

/// Joint histogram of the gray level at each window centre and that window's rank level.
inline Grcm build_grcm(const QuantizedImage& gray, const RankMatrix& ranks) {
  const std::size_t m = ranks.margin;
  if (ranks.levels.size() != ranks.valid_width * ranks.valid_height ||
      gray.levels.size() != gray.width * gray.height ||
      ranks.valid_width + 2 * m != gray.width || ranks.valid_height + 2 * m != gray.height) {
    throw Error(Errc::DimensionMismatch, "rank matrix geometry does not match the gray image");
  }
  Grcm h;
  h.gray_levels = gray.gray_levels;
  h.rank_levels = ranks.config.rank_levels;
  h.counts.assign(static_cast<std::size_t>(h.gray_levels) * h.rank_levels, 0);

  for (std::size_t y = 0; y < ranks.valid_height; ++y) {
    const std::uint8_t* g = &gray.levels[(y + m) * gray.width + m];
    const std::uint8_t* r = &ranks.levels[y * ranks.valid_width];
    for (std::size_t x = 0; x < ranks.valid_width; ++x) {
      if (g[x] >= h.gray_levels || r[x] >= h.rank_levels) {
        throw Error(Errc::DimensionMismatch, "level outside the configured range");
      }
      ++h.counts[static_cast<std::size_t>(g[x]) * h.rank_levels + r[x]];
    }
  }
  h.total = ranks.valid_width * ranks.valid_height;
  return h;
}

inline GrcmProbability to_probability(const Grcm& h) {
  if (h.total == 0) {
    throw Error(Errc::EmptyMatrix, "GRCM has no counts");
  }
  GrcmProbability p;
  p.gray_levels = h.gray_levels;
  p.rank_levels = h.rank_levels;
  p.probs.resize(h.counts.size());
  const double total = static_cast<double>(h.total);
  std::transform(h.counts.begin(), h.counts.end(), p.probs.begin(),
                 [total](std::uint64_t c) { return static_cast<double>(c) / total; });
  return p;
}

/// Counts as CSV: header `gray_level,rank_0,...`, one row per gray level.
inline void write_grcm_csv(const std::filesystem::path& path, const Grcm& h) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  }
  out << "gray_level";
  for (int j = 0; j < h.rank_levels; ++j) out << ",rank_" << j;
  out << '\n';
  for (int i = 0; i < h.gray_levels; ++i) {
    out << i;
    for (int j = 0; j < h.rank_levels; ++j) out << ',' << h.at(i, j);
    out << '\n';
  }
}

/// Heat image of log(1 + count), scaled so the largest cell is 255.
/// Width is rank_levels, height is gray_levels.
inline std::vector<std::uint8_t> grcm_heat_pixels(const Grcm& h) {
  std::vector<std::uint8_t> px(h.counts.size(), 0);
  const auto peak = h.counts.empty() ? 0 : *std::max_element(h.counts.begin(), h.counts.end());
  if (peak == 0) return px;
  const double scale = 255.0 / std::log1p(static_cast<double>(peak));
  std::transform(h.counts.begin(), h.counts.end(), px.begin(), [scale](std::uint64_t c) {
    return static_cast<std::uint8_t>(std::lround(std::log1p(static_cast<double>(c)) * scale));
  });
  return px;
}

inline void write_grcm_pgm(const std::filesystem::path& path, const Grcm& h) {
  write_pgm(path, static_cast<std::size_t>(h.rank_levels), static_cast<std::size_t>(h.gray_levels),
            grcm_heat_pixels(h));
}

}  // namespace dustgrcm
