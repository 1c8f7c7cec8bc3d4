#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dustgrcm/error.hpp"
#include "dustgrcm/imaging.hpp"

namespace dustgrcm {

/// Sliding-window geometry and rank quantization.
struct RankConfig {
  int window = 3;       ///< odd side length, >= 3
  int rank_levels = 3;  ///< 1 <= rank_levels <= window

  int margin() const noexcept { return window / 2; }

  void validate() const {
    if (window < 3 || window % 2 == 0) {
      throw Error(Errc::InvalidConfig, "window must be odd and >= 3, got " + std::to_string(window));
    }
    if (rank_levels < 1 || rank_levels > window) {
      throw Error(Errc::InvalidLevelCount,
                  "rank levels must be in [1, window], got " + std::to_string(rank_levels));
    }
  }

  friend bool operator==(const RankConfig&, const RankConfig&) = default;
};

/// Per-pixel neighborhood rank over the valid (fully windowed) region.
struct RankMatrix {
  std::size_t valid_width = 0;
  std::size_t valid_height = 0;
  std::size_t margin = 0;
  RankConfig config;
  std::vector<std::uint8_t> levels;     ///< in [0, rank_levels - 1]
  std::vector<std::uint8_t> raw_ranks;  ///< in [0, window]

  std::uint8_t level_at(std::size_t x, std::size_t y) const { return levels[y * valid_width + x]; }
  std::uint8_t raw_at(std::size_t x, std::size_t y) const { return raw_ranks[y * valid_width + x]; }

  friend bool operator==(const RankMatrix&, const RankMatrix&) = default;
};

namespace detail {

using Int256 = boost::multiprecision::int256_t;
using BigInt = boost::multiprecision::cpp_int;

// Fraction-free (Bareiss) elimination with row pivoting and column skipping.
// `a` is n x n row-major and is destroyed. Every intermediate entry is a minor of
// the input, so every division is exact.
template <class Int>
int bareiss_rank(std::span<Int> a, std::size_t n) {
  Int prev = 1;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < n; ++col) {
    std::size_t pivot = rank;
    while (pivot < n && a[pivot * n + col] == 0) ++pivot;
    if (pivot == n) continue;
    if (pivot != rank) {
      for (std::size_t j = col; j < n; ++j) std::swap(a[pivot * n + j], a[rank * n + j]);
    }
    const Int p = a[rank * n + col];
    for (std::size_t i = rank + 1; i < n; ++i) {
      const Int f = a[i * n + col];
      for (std::size_t j = col + 1; j < n; ++j) {
        a[i * n + j] = (p * a[i * n + j] - f * a[rank * n + j]) / prev;
      }
      a[i * n + col] = 0;
    }
    prev = p;
    ++rank;
  }
  return static_cast<int>(rank);
}

// Bits needed for the largest Bareiss intermediate on an n x n matrix with
// |entry| <= max_abs: two products of (n-1)-minors, each Hadamard-bounded.
inline double bareiss_bits(std::size_t n, long long max_abs) {
  if (n <= 1 || max_abs == 0) return 2.0;
  const double m = static_cast<double>(n - 1);
  const double minor_bits = m * (0.5 * std::log2(m) + std::log2(static_cast<double>(max_abs)));
  const double pivot_bits = static_cast<double>(n) *
                            (0.5 * std::log2(static_cast<double>(n)) + std::log2(static_cast<double>(max_abs)));
  return std::max(2.0 * minor_bits + 1.0, pivot_bits) + 1.0;
}

enum class RankIntKind { I64, I128, I256, Big };

inline RankIntKind select_rank_int(std::size_t n, long long max_abs) {
  const double bits = bareiss_bits(n, max_abs);
  if (bits <= 62.0) return RankIntKind::I64;
  if (bits <= 126.0) return RankIntKind::I128;
  if (bits <= 254.0) return RankIntKind::I256;
  return RankIntKind::Big;
}

template <class F>
decltype(auto) dispatch_rank_int(RankIntKind kind, F&& f) {
  switch (kind) {
    case RankIntKind::I64: return f(std::type_identity<std::int64_t>{});
    case RankIntKind::I128: return f(std::type_identity<__int128>{});
    case RankIntKind::I256: return f(std::type_identity<Int256>{});
    case RankIntKind::Big: break;
  }
  return f(std::type_identity<BigInt>{});
}

}  // namespace detail

/// Exact rank of a square integer matrix given row-major.
inline int window_rank(std::span<const int> entries, std::size_t rows, std::size_t cols) {
  if (rows != cols) {
    throw Error(Errc::NonSquareWindow,
                std::to_string(rows) + "x" + std::to_string(cols) + " window");
  }
  if (entries.size() != rows * cols) {
    throw Error(Errc::DimensionMismatch, "entry count does not match window shape");
  }
  long long max_abs = 0;
  for (int v : entries) max_abs = std::max(max_abs, std::llabs(static_cast<long long>(v)));
  const auto kind = detail::select_rank_int(rows, max_abs);
  return detail::dispatch_rank_int(kind, [&]<class Int>(std::type_identity<Int>) {
    std::vector<Int> work(entries.begin(), entries.end());
    return detail::bareiss_rank<Int>(work, rows);
  });
}

inline int window_rank(const std::vector<std::vector<int>>& window) {
  const std::size_t rows = window.size();
  std::vector<int> flat;
  for (const auto& row : window) {
    if (row.size() != rows) {
      throw Error(Errc::NonSquareWindow, "ragged or non-square window");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return window_rank(flat, rows, rows);
}

/// Maps a raw rank onto [0, rank_levels - 1] via (max(r,1) - 1) / (w - 1) * L_M,
/// floored and clamped. Rank 0 (all-zero window) shares level 0 with rank 1.
inline int rank_level(int raw_rank, const RankConfig& cfg) noexcept {
  const int r = std::max(raw_rank, 1) - 1;
  const int level = (r * cfg.rank_levels) / (cfg.window - 1);
  return std::min(level, cfg.rank_levels - 1);
}

namespace detail {

template <class Int>
void rank_rows(const QuantizedImage& img, const RankConfig& cfg, RankMatrix& out,
               std::size_t row_begin, std::size_t row_end) {
  const auto w = static_cast<std::size_t>(cfg.window);
  std::vector<Int> scratch(w * w);
  for (std::size_t y = row_begin; y < row_end; ++y) {
    for (std::size_t x = 0; x < out.valid_width; ++x) {
      for (std::size_t r = 0; r < w; ++r) {
        const std::uint8_t* src = &img.levels[(y + r) * img.width + x];
        for (std::size_t c = 0; c < w; ++c) scratch[r * w + c] = src[c];
      }
      const int raw = bareiss_rank<Int>(scratch, w);
      const std::size_t idx = y * out.valid_width + x;
      out.raw_ranks[idx] = static_cast<std::uint8_t>(raw);
      out.levels[idx] = static_cast<std::uint8_t>(rank_level(raw, cfg));
    }
  }
}

}  // namespace detail

/// Rank of every full w x w window of `img`, cell (x, y) centred on pixel
/// (x + margin, y + margin). Rows are split across `threads` workers; output is
/// identical for any thread count.
inline RankMatrix rank_matrix(const QuantizedImage& img, const RankConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  const auto w = static_cast<std::size_t>(cfg.window);
  if (img.width < w || img.height < w) {
    throw Error(Errc::ImageTooSmall, std::to_string(img.width) + "x" + std::to_string(img.height) +
                                         " image for window " + std::to_string(w));
  }
  RankMatrix out;
  out.config = cfg;
  out.margin = w / 2;
  out.valid_width = img.width - 2 * out.margin;
  out.valid_height = img.height - 2 * out.margin;
  out.levels.assign(out.valid_width * out.valid_height, 0);
  out.raw_ranks.assign(out.valid_width * out.valid_height, 0);

  long long max_level = 0;
  for (auto v : img.levels) max_level = std::max<long long>(max_level, v);
  const auto kind = detail::select_rank_int(w, max_level);

  detail::dispatch_rank_int(kind, [&]<class Int>(std::type_identity<Int>) {
    threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(out.valid_height));
    if (threads == 1) {
      detail::rank_rows<Int>(img, cfg, out, 0, out.valid_height);
      return;
    }
    std::vector<std::jthread> workers;
    const std::size_t chunk = (out.valid_height + threads - 1) / threads;
    for (std::size_t begin = 0; begin < out.valid_height; begin += chunk) {
      const std::size_t end = std::min(out.valid_height, begin + chunk);
      workers.emplace_back([&img, &cfg, &out, begin, end] { detail::rank_rows<Int>(img, cfg, out, begin, end); });
    }
  });
  return out;
}

/// Rank levels stretched to 0..255 for visual inspection.
inline std::vector<std::uint8_t> rank_levels_as_pixels(const RankMatrix& m) {
  std::vector<std::uint8_t> px(m.levels.size(), 0);
  const int top = m.config.rank_levels - 1;
  if (top > 0) {
    std::transform(m.levels.begin(), m.levels.end(), px.begin(),
                   [top](std::uint8_t l) { return static_cast<std::uint8_t>(l * 255 / top); });
  }
  return px;
}

inline void write_rank_pgm(const std::filesystem::path& path, const RankMatrix& m) {
  write_pgm(path, m.valid_width, m.valid_height, rank_levels_as_pixels(m));
}

}  // namespace dustgrcm
