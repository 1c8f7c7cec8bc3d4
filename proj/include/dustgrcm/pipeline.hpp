#pragma once

#include <vector>

#include "dustgrcm/grcm.hpp"
#include "dustgrcm/imaging.hpp"
#include "dustgrcm/inertia.hpp"
#include "dustgrcm/rank.hpp"

namespace dustgrcm {

/// Operating point of the measurement pipeline. Defaults: 3x3 window,
/// 3 rank levels, 256 gray levels.
struct PipelineConfig {
  int window = 3;
  int rank_levels = 3;
  int gray_levels = 256;

  RankConfig rank_config() const { return {window, rank_levels}; }

  void validate() const {
    rank_config().validate();
    check_gray_levels(gray_levels);
  }

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

struct PipelineResult {
  QuantizedImage quantized;
  RankMatrix ranks;
  Grcm grcm;
  double inertia = 0.0;
};

/// quantize -> rank matrix -> GRCM -> moment of inertia.
inline PipelineResult run_pipeline(const GrayImage& img, const PipelineConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  PipelineResult r;
  r.quantized = quantize_gray(img, cfg.gray_levels);
  r.ranks = rank_matrix(r.quantized, cfg.rank_config(), threads);
  r.grcm = build_grcm(r.quantized, r.ranks);
  r.inertia = moment_of_inertia(to_probability(r.grcm));
  return r;
}

inline double image_inertia(const GrayImage& img, const PipelineConfig& cfg, unsigned threads = 1) {
  return run_pipeline(img, cfg, threads).inertia;
}

/// Image with its reference concentration in mg/m^3.
struct LabeledImage {
  GrayImage image;
  double concentration = 0.0;
};

}  // namespace dustgrcm
