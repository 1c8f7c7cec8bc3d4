#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dustgrcm/calibration.hpp"
#include "dustgrcm/pipeline.hpp"

namespace dustgrcm {

/// Fitting/test partition. The fitting subset is spread evenly over the
/// concentration-sorted corpus and always includes its lowest and highest
/// samples, so the fitted frame brackets the test set.
struct SplitRule {
  double fitting_fraction = 9.0 / 21.0;
};

struct SplitIndices {
  std::vector<std::size_t> fitting;
  std::vector<std::size_t> test;
};

inline SplitIndices split_by_concentration(std::span<const double> concentrations, const SplitRule& rule = {}) {
  const std::size_t n = concentrations.size();
  SplitIndices out;
  if (n == 0) return out;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return concentrations[a] < concentrations[b]; });

  auto n_fit = static_cast<std::size_t>(std::lround(rule.fitting_fraction * static_cast<double>(n)));
  n_fit = std::clamp<std::size_t>(n_fit, std::min<std::size_t>(4, n), n);

  std::vector<bool> is_fit(n, false);
  if (n_fit == 1) {
    is_fit[0] = true;
  } else {
    const double step = static_cast<double>(n - 1) / static_cast<double>(n_fit - 1);
    for (std::size_t k = 0; k < n_fit; ++k) {
      is_fit[static_cast<std::size_t>(std::lround(step * static_cast<double>(k)))] = true;
    }
  }
  for (std::size_t pos = 0; pos < n; ++pos) {
    (is_fit[pos] ? out.fitting : out.test).push_back(order[pos]);
  }
  std::sort(out.fitting.begin(), out.fitting.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

struct SweepRow {
  int window = 0;
  bool ok = false;
  std::string failure;  ///< error text when !ok
  ErrorReport report;   ///< test-split errors
  PcmModel model;
  double ms_per_image = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;  ///< ordered as the requested windows
};

/// Fits and evaluates one model per window size over the same split.
/// A failing window is recorded and the sweep continues.
inline SweepReport window_sweep(std::span<const LabeledImage> corpus, std::span<const int> windows,
                                const SplitRule& split = {}, PipelineConfig base = {}) {
  std::vector<double> labels;
  labels.reserve(corpus.size());
  for (const auto& item : corpus) labels.push_back(item.concentration);
  const auto parts = split_by_concentration(labels, split);

  SweepReport report;
  for (int w : windows) {
    SweepRow row;
    row.window = w;
    try {
      PipelineConfig cfg = base;
      cfg.window = w;
      cfg.validate();

      std::vector<CalibrationSample> samples(corpus.size());
      const auto t0 = std::chrono::steady_clock::now();
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        samples[i] = {image_inertia(corpus[i].image, cfg), corpus[i].concentration};
      }
      const auto t1 = std::chrono::steady_clock::now();
      if (!corpus.empty()) {
        row.ms_per_image = std::chrono::duration<double, std::milli>(t1 - t0).count() /
                           static_cast<double>(corpus.size());
      }

      std::vector<CalibrationSample> fitting, test;
      for (auto i : parts.fitting) fitting.push_back(samples[i]);
      for (auto i : parts.test) test.push_back(samples[i]);
      row.model = fit_pcm(fitting, cfg).model;
      row.report = evaluate(row.model, test);
      row.ok = true;
    } catch (const Error& e) {
      row.ok = false;
      row.failure = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

inline void write_sweep_csv(std::ostream& out, const SweepReport& report) {
  out << "window,mean_abs_err_pct,max_abs_err_pct,ms_per_image,status\n";
  for (const auto& r : report.rows) {
    out << r.window << ',';
    if (r.ok) {
      out << r.report.mean_abs_relative_error_percent << ',' << r.report.max_abs_relative_error_percent;
    } else {
      out << "nan,nan";
    }
    out << ',' << r.ms_per_image << ',';
    if (r.ok) {
      out << "ok";
    } else {
      std::string msg = r.failure;
      std::replace(msg.begin(), msg.end(), ',', ';');
      out << "failed: " << msg;
    }
    out << '\n';
  }
}

}  // namespace dustgrcm
