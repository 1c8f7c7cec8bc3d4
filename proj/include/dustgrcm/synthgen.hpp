#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dustgrcm/error.hpp"
#include "dustgrcm/imaging.hpp"
#include "dustgrcm/pipeline.hpp"

namespace dustgrcm {

/// SplitMix64 (Steele, Lea, Flood 2014). Fixed algorithm so that generated
/// images are bit-identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

struct DustSceneSpec {
  std::size_t width = 640;
  std::size_t height = 360;
  double density = 0.0;  ///< particles per 1000 pixels
  double radius_min = 1.5;
  double radius_max = 2.5;
  double peak_min = 90.0;
  double peak_max = 130.0;
  double background = 12.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (width == 0 || height == 0) {
      throw Error(Errc::ZeroArea, "scene must be at least 1x1");
    }
    if (!(density >= 0.0) || !(radius_min > 0.0) || !(radius_min <= radius_max) ||
        !(peak_min >= 0.0) || !(peak_min <= peak_max) || !(peak_max <= 255.0) ||
        !(background >= 0.0) || !(background <= 255.0)) {
      throw Error(Errc::InvalidConfig, "invalid dust scene parameters");
    }
  }
};

inline std::size_t particle_count(const DustSceneSpec& spec) {
  return static_cast<std::size_t>(
      std::llround(spec.density * static_cast<double>(spec.width * spec.height) / 1000.0));
}

/// Renders additive Gaussian blobs (sigma = radius / 2, cut off at 2 * radius)
/// over a flat background. Each particle draws x, y, radius, peak in that order.
inline GrayImage generate_dust_image(const DustSceneSpec& spec) {
  spec.validate();
  const auto w = spec.width;
  const auto h = spec.height;
  std::vector<double> acc(w * h, spec.background);

  SplitMix64 rng(spec.seed);
  const std::size_t n = particle_count(spec);
  for (std::size_t k = 0; k < n; ++k) {
    const double cx = rng.uniform(0.0, static_cast<double>(w));
    const double cy = rng.uniform(0.0, static_cast<double>(h));
    const double radius = rng.uniform(spec.radius_min, spec.radius_max);
    const double peak = rng.uniform(spec.peak_min, spec.peak_max);

    const double sigma = radius / 2.0;
    const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
    const double reach = 2.0 * radius;
    const auto x0 = static_cast<long>(std::max(0.0, std::floor(cx - reach)));
    const auto x1 = static_cast<long>(std::min(static_cast<double>(w - 1), std::ceil(cx + reach)));
    const auto y0 = static_cast<long>(std::max(0.0, std::floor(cy - reach)));
    const auto y1 = static_cast<long>(std::min(static_cast<double>(h - 1), std::ceil(cy + reach)));
    for (long y = y0; y <= y1; ++y) {
      const double dy = (static_cast<double>(y) + 0.5) - cy;
      for (long x = x0; x <= x1; ++x) {
        const double dx = (static_cast<double>(x) + 0.5) - cx;
        const double d2 = dx * dx + dy * dy;
        if (d2 > reach * reach) continue;
        acc[static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x)] += peak * std::exp(-d2 * inv_two_var);
      }
    }
  }

  std::vector<std::uint8_t> px(acc.size());
  std::transform(acc.begin(), acc.end(), px.begin(), [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
  });
  return GrayImage(w, h, std::move(px));
}

/// Affine label map: concentration = slope * density + offset (mg/m^3).
struct ConcentrationMap {
  double slope = 10.0;
  double offset = 0.0;

  double operator()(double density) const noexcept { return slope * density + offset; }
};

/// One image per density; image k uses seed base_seed + k.
inline std::vector<LabeledImage> generate_corpus(std::span<const double> densities, const ConcentrationMap& map,
                                                 std::uint64_t base_seed, DustSceneSpec scene = {}) {
  if (densities.empty()) {
    throw Error(Errc::TooFewSamples, "density list is empty");
  }
  std::vector<LabeledImage> corpus;
  corpus.reserve(densities.size());
  for (std::size_t k = 0; k < densities.size(); ++k) {
    scene.density = densities[k];
    scene.seed = base_seed + k;
    corpus.push_back({generate_dust_image(scene), map(densities[k])});
  }
  return corpus;
}

}  // namespace dustgrcm
