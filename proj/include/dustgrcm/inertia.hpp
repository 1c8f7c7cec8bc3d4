#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dustgrcm/error.hpp"
#include "dustgrcm/grcm.hpp"

namespace dustgrcm {

/// Second moment of GRCM probability mass about the (0, 0) corner:
/// sum over cells of (i^2 + j^2) * P(i, j), i = gray level, j = rank level.
/// Evaluated through the row and column marginals.
inline double moment_of_inertia(const GrcmProbability& p) {
  double gray_term = 0.0;
  std::vector<double> column_mass(static_cast<std::size_t>(p.rank_levels), 0.0);
  for (int i = 0; i < p.gray_levels; ++i) {
    double row_mass = 0.0;
    for (int j = 0; j < p.rank_levels; ++j) {
      const double v = p.at(i, j);
      row_mass += v;
      column_mass[static_cast<std::size_t>(j)] += v;
    }
    gray_term += static_cast<double>(i) * i * row_mass;
  }
  double rank_term = 0.0;
  for (int j = 0; j < p.rank_levels; ++j) {
    rank_term += static_cast<double>(j) * j * column_mass[static_cast<std::size_t>(j)];
  }
  return gray_term + rank_term;
}

/// Min/max of the inertia set used to map J onto s in [0, 1].
struct NormalizationFrame {
  double j_min = 0.0;
  double j_max = 0.0;
  std::size_t count = 0;

  friend bool operator==(const NormalizationFrame&, const NormalizationFrame&) = default;
};

struct NormalizedSet {
  NormalizationFrame frame;
  std::vector<double> s;
};

struct NormalizedValue {
  double s = 0.0;
  bool out_of_range = false;
};

inline NormalizedSet normalize_set(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(Errc::TooFewSamples, "normalization needs at least 2 values, got " +
                                         std::to_string(values.size()));
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  NormalizedSet out;
  out.frame = {*lo, *hi, values.size()};
  if (!(out.frame.j_max > out.frame.j_min)) {
    throw Error(Errc::DegenerateSet, "all inertia values are equal");
  }
  const double span = out.frame.j_max - out.frame.j_min;
  out.s.reserve(values.size());
  for (double v : values) out.s.push_back((v - out.frame.j_min) / span);
  return out;
}

/// Maps a value through a fixed frame. Values outside the frame extrapolate
/// linearly and raise out_of_range; s is never clamped.
inline NormalizedValue normalize_with(double value, const NormalizationFrame& frame) {
  if (!(frame.j_max > frame.j_min)) {
    throw Error(Errc::DegenerateFrame, "frame has j_max <= j_min");
  }
  const double s = (value - frame.j_min) / (frame.j_max - frame.j_min);
  return {s, s < 0.0 || s > 1.0};
}

}  // namespace dustgrcm
