#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dustgrcm/error.hpp"
#include "dustgrcm/inertia.hpp"
#include "dustgrcm/pipeline.hpp"

namespace dustgrcm {

/// One labeled calibration point: GRCM inertia J and reference concentration c* (mg/m^3).
struct CalibrationSample {
  double inertia = 0.0;
  double standard_concentration = 0.0;

  friend bool operator==(const CalibrationSample&, const CalibrationSample&) = default;
};

/// Zero-intercept cubic c(s) = k1 s^3 + k2 s^2 + k3 s over normalized inertia s,
/// together with the frame and pipeline settings that define s.
struct PcmModel {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  NormalizationFrame frame;
  RankConfig window;
  int gray_levels = 256;
  std::string dust_type;

  double concentration_at(double s) const noexcept { return ((k1 * s + k2) * s + k3) * s; }

  PipelineConfig pipeline() const { return {window.window, window.rank_levels, gray_levels}; }

  friend bool operator==(const PcmModel&, const PcmModel&) = default;
};

/// Normal-matrix 1-norm condition estimate above which a fit is flagged.
inline constexpr double kIllConditionedThreshold = 1e12;

struct PcmFit {
  PcmModel model;
  std::vector<double> s;  ///< normalized inertia of each sample, input order
  double condition_estimate = 0.0;
  bool ill_conditioned = false;
  double residual_sum_squares = 0.0;
};

namespace detail {

using Mat3 = std::array<std::array<double, 3>, 3>;

inline double norm1(const Mat3& a) {
  double best = 0.0;
  for (int c = 0; c < 3; ++c) {
    best = std::max(best, std::abs(a[0][c]) + std::abs(a[1][c]) + std::abs(a[2][c]));
  }
  return best;
}

// Gauss-Jordan with partial pivoting; returns nullopt when singular.
inline std::optional<Mat3> invert3(Mat3 a) {
  Mat3 inv{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (a[piv][col] == 0.0) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const double d = a[col][col];
    for (int c = 0; c < 3; ++c) {
      a[col][c] /= d;
      inv[col][c] /= d;
    }
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (int c = 0; c < 3; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

}  // namespace detail

/// Least-squares fit of the cubic over basis {s^3, s^2, s}.
///
/// s is computed from the sample inertias with `normalize_set`, unless `frame`
/// is given, in which case that (wider) frame is used as-is. This covers the
/// case where the fitting samples are a subset of the set that defines J_min
/// and J_max.
inline PcmFit fit_pcm(std::span<const CalibrationSample> samples, const PipelineConfig& config = {},
                      std::string dust_type = {},
                      std::optional<NormalizationFrame> frame = std::nullopt) {
  if (samples.size() < 4) {
    throw Error(Errc::TooFewSamples, "fit needs at least 4 samples, got " + std::to_string(samples.size()));
  }
  config.validate();

  std::vector<double> inertia;
  inertia.reserve(samples.size());
  bool any_nonzero = false;
  for (const auto& smp : samples) {
    if (!(smp.standard_concentration >= 0.0)) {
      throw Error(Errc::DegenerateSet, "negative standard concentration");
    }
    any_nonzero = any_nonzero || smp.standard_concentration > 0.0;
    inertia.push_back(smp.inertia);
  }

  PcmFit fit;
  if (frame) {
    fit.model.frame = *frame;
    fit.s.reserve(samples.size());
    for (double j : inertia) fit.s.push_back(normalize_with(j, *frame).s);
  } else {
    auto normalized = normalize_set(inertia);
    fit.model.frame = normalized.frame;
    fit.s = std::move(normalized.s);
  }
  if (std::set<double>(inertia.begin(), inertia.end()).size() < 4) {
    throw Error(Errc::TooFewSamples, "fit needs at least 4 distinct inertia values");
  }
  if (!any_nonzero) {
    throw Error(Errc::DegenerateSet, "all standard concentrations are zero");
  }

  // Normal equations (A^T A) k = A^T c with A = [s^3 s^2 s].
  detail::Mat3 ata{};
  std::array<double, 3> atc{};
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const double s = fit.s[n];
    const std::array<double, 3> row{s * s * s, s * s, s};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) ata[a][b] += row[a] * row[b];
      atc[a] += row[a] * samples[n].standard_concentration;
    }
  }
  const auto inv = detail::invert3(ata);
  if (!inv) {
    throw Error(Errc::DegenerateSet, "normal equations are singular");
  }
  std::array<double, 3> k{};
  for (int a = 0; a < 3; ++a) {
    k[a] = (*inv)[a][0] * atc[0] + (*inv)[a][1] * atc[1] + (*inv)[a][2] * atc[2];
  }
  fit.condition_estimate = detail::norm1(ata) * detail::norm1(*inv);
  fit.ill_conditioned = !(fit.condition_estimate <= kIllConditionedThreshold);

  fit.model.k1 = k[0];
  fit.model.k2 = k[1];
  fit.model.k3 = k[2];
  fit.model.window = config.rank_config();
  fit.model.gray_levels = config.gray_levels;
  fit.model.dust_type = std::move(dust_type);
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const double r = fit.model.concentration_at(fit.s[n]) - samples[n].standard_concentration;
    fit.residual_sum_squares += r * r;
  }
  return fit;
}

struct Prediction {
  double concentration = 0.0;  ///< mg/m^3, never negative
  double s = 0.0;
  bool out_of_range = false;   ///< s outside [0, 1] or negative raw estimate
};

inline Prediction predict(const PcmModel& model, double inertia) {
  const auto norm = normalize_with(inertia, model.frame);
  Prediction p{model.concentration_at(norm.s), norm.s, norm.out_of_range};
  if (p.concentration < 0.0) {
    p.concentration = 0.0;
    p.out_of_range = true;
  }
  return p;
}

struct ErrorRow {
  double inertia = 0.0;
  double standard = 0.0;
  double predicted = 0.0;
  double relative_error_percent = 0.0;  ///< (predicted - standard) / standard * 100
};

struct ErrorReport {
  std::vector<ErrorRow> rows;
  double mean_abs_relative_error_percent = 0.0;
  double max_abs_relative_error_percent = 0.0;
};

inline double relative_error_percent(double predicted, double standard) {
  return (predicted - standard) / standard * 100.0;
}

inline ErrorReport summarize_errors(std::vector<ErrorRow> rows) {
  ErrorReport rep;
  rep.rows = std::move(rows);
  double sum = 0.0;
  for (const auto& r : rep.rows) {
    const double a = std::abs(r.relative_error_percent);
    sum += a;
    rep.max_abs_relative_error_percent = std::max(rep.max_abs_relative_error_percent, a);
  }
  if (!rep.rows.empty()) rep.mean_abs_relative_error_percent = sum / static_cast<double>(rep.rows.size());
  return rep;
}

inline ErrorReport evaluate(const PcmModel& model, std::span<const CalibrationSample> test) {
  if (test.empty()) {
    throw Error(Errc::TooFewSamples, "no test samples to evaluate");
  }
  std::vector<ErrorRow> rows;
  rows.reserve(test.size());
  for (const auto& smp : test) {
    if (!(smp.standard_concentration > 0.0)) {
      throw Error(Errc::ZeroStandard, "test sample with inertia " + std::to_string(smp.inertia));
    }
    const double predicted = predict(model, smp.inertia).concentration;
    rows.push_back({smp.inertia, smp.standard_concentration, predicted,
                    relative_error_percent(predicted, smp.standard_concentration)});
  }
  return summarize_errors(std::move(rows));
}

// ---- persistence ----------------------------------------------------------

inline constexpr int kModelSchemaVersion = 1;

inline nlohmann::json model_to_json(const PcmModel& m) {
  return {
      {"schema_version", kModelSchemaVersion},
      {"dust_type", m.dust_type},
      {"k1", m.k1},
      {"k2", m.k2},
      {"k3", m.k3},
      {"j_min", m.frame.j_min},
      {"j_max", m.frame.j_max},
      {"sample_count", m.frame.count},
      {"window", m.window.window},
      {"rank_levels", m.window.rank_levels},
      {"gray_levels", m.gray_levels},
  };
}

inline PcmModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
    throw Error(Errc::MalformedModelFile, "missing schema_version");
  }
  if (j["schema_version"].get<int>() != kModelSchemaVersion) {
    throw Error(Errc::VersionMismatch, "schema_version " + j["schema_version"].dump() + ", supported " +
                                           std::to_string(kModelSchemaVersion));
  }
  PcmModel m;
  try {
    m.dust_type = j.at("dust_type").get<std::string>();
    m.k1 = j.at("k1").get<double>();
    m.k2 = j.at("k2").get<double>();
    m.k3 = j.at("k3").get<double>();
    m.frame.j_min = j.at("j_min").get<double>();
    m.frame.j_max = j.at("j_max").get<double>();
    m.frame.count = j.at("sample_count").get<std::size_t>();
    m.window.window = j.at("window").get<int>();
    m.window.rank_levels = j.at("rank_levels").get<int>();
    m.gray_levels = j.at("gray_levels").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedModelFile, e.what());
  }
  try {
    m.pipeline().validate();
  } catch (const Error& e) {
    throw Error(Errc::MalformedModelFile, e.what());
  }
  if (!(m.frame.j_max > m.frame.j_min)) {
    throw Error(Errc::MalformedModelFile, "j_max must exceed j_min");
  }
  return m;
}

inline void save_model(const PcmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  }
  out << model_to_json(model).dump(2) << '\n';
  if (!out) {
    throw Error(Errc::IoError, "write failed for " + path.string());
  }
}

inline PcmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::IoError, "cannot open " + path.string());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedModelFile, path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace dustgrcm
