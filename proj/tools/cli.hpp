#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dustgrcm/dustgrcm.hpp"

namespace dustgrcm::cli {

/// Exit codes: 0 success, 1 usage error, 2 data or pipeline error.
enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2 };

namespace detail {

inline const auto kOddWindow = CLI::Validator(
    [](std::string& v) -> std::string {
      int w = 0;
      try {
        w = std::stoi(v);
      } catch (...) {
        return "window must be an integer";
      }
      if (w < 3 || w % 2 == 0) return "window must be odd and >= 3, got " + v;
      return {};
    },
    "ODD>=3", "OddWindow");

inline void add_pipeline_flags(CLI::App* cmd, PipelineConfig& cfg) {
  cmd->add_option("--window", cfg.window, "Rank window side (odd, >= 3)")->check(kOddWindow)->capture_default_str();
  cmd->add_option("--rank-levels", cfg.rank_levels, "Rank quantization levels")
      ->check(CLI::Range(1, 255))
      ->capture_default_str();
  cmd->add_option("--gray-levels", cfg.gray_levels, "Gray quantization levels")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
}

// Runs `fn(i)` for i in [0, n) on up to `threads` workers. Results must be
// written by index; the first failure in index order is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(std::max<std::size_t>(n, 1)));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// Writes to `path` or, when empty, to `fallback`.
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_ = open_for_write(path);
    } else {
      fallback_ = &fallback;
      saved_precision_ = fallback.precision(std::numeric_limits<double>::max_digits10);
    }
  }
  ~OutputTarget() {
    if (fallback_) fallback_->precision(saved_precision_);
  }
  OutputTarget(const OutputTarget&) = delete;
  OutputTarget& operator=(const OutputTarget&) = delete;

  std::ostream& stream() { return fallback_ ? *fallback_ : static_cast<std::ostream&>(file_); }

 private:
  std::ofstream file_;
  std::ostream* fallback_ = nullptr;
  std::streamsize saved_precision_ = 6;
};

inline std::vector<LabeledImage> load_corpus(const SampleTable& table) {
  std::vector<LabeledImage> corpus;
  corpus.reserve(table.images.size());
  for (const auto& e : table.images) corpus.push_back({load_gray_image(e.path), e.concentration});
  return corpus;
}

}  // namespace detail

struct GenArgs {
  std::vector<double> densities;
  std::uint64_t seed = 1;
  std::string out;
  DustSceneSpec scene;
  ConcentrationMap map;
};

inline int cmd_gen(const GenArgs& a, std::ostream& out) {
  if (a.densities.empty()) {
    throw CLI::ValidationError("--densities", "density list is empty");
  }
  std::filesystem::create_directories(a.out);
  const auto corpus = generate_corpus(a.densities, a.map, a.seed, a.scene);
  std::vector<ManifestEntry> manifest;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    std::ostringstream name;
    name << "dust_" << std::setw(3) << std::setfill('0') << k << ".pgm";
    save_gray_image(std::filesystem::path(a.out) / name.str(), corpus[k].image);
    manifest.push_back({name.str(), corpus[k].concentration});
  }
  const auto manifest_path = std::filesystem::path(a.out) / "manifest.csv";
  write_manifest_csv(manifest_path, manifest);
  out << "wrote " << corpus.size() << " images and " << manifest_path.string() << '\n';
  return kOk;
}

struct CalibrateArgs {
  std::string samples_csv;
  std::string model_out;
  std::string dust_type = "cement";
  PipelineConfig config;
  unsigned threads = detail::default_threads();
};

inline int cmd_calibrate(const CalibrateArgs& a, std::ostream& out, std::ostream& err) {
  const auto table = read_sample_csv(a.samples_csv);
  std::vector<CalibrationSample> samples;
  if (table.kind == SampleTable::Kind::Features) {
    samples = table.features;
  } else {
    samples.resize(table.images.size());
    detail::parallel_for(table.images.size(), a.threads, [&](std::size_t i) {
      const auto& e = table.images[i];
      samples[i] = {image_inertia(load_gray_image(e.path), a.config), e.concentration};
    });
  }

  const auto fit = fit_pcm(samples, a.config, a.dust_type);
  save_model(fit.model, a.model_out);

  const auto prec = out.precision(std::numeric_limits<double>::max_digits10);
  out << "k1 " << fit.model.k1 << "\nk2 " << fit.model.k2 << "\nk3 " << fit.model.k3 << '\n';
  out << "j_min " << fit.model.frame.j_min << "\nj_max " << fit.model.frame.j_max << '\n';
  out.precision(prec);
  if (fit.ill_conditioned) {
    err << "warning: ill-conditioned fit (condition estimate " << fit.condition_estimate << ")\n";
  }

  std::vector<CalibrationSample> scored;
  std::copy_if(samples.begin(), samples.end(), std::back_inserter(scored),
               [](const CalibrationSample& s) { return s.standard_concentration > 0.0; });
  if (!scored.empty()) {
    const auto rep = evaluate(fit.model, scored);
    out << "fitting set: " << scored.size() << " samples, mean |error| "
        << rep.mean_abs_relative_error_percent << " %, max |error| " << rep.max_abs_relative_error_percent
        << " %\n";
  }
  out << "model written to " << a.model_out << '\n';
  return kOk;
}

struct MeasureArgs {
  std::vector<std::string> images;
  std::string model;
  std::string out;
  unsigned threads = detail::default_threads();
};

inline int cmd_measure(const MeasureArgs& a, std::ostream& out) {
  const auto model = load_model(a.model);
  const auto cfg = model.pipeline();

  struct Row {
    double inertia = 0.0;
    Prediction p;
  };
  std::vector<Row> rows(a.images.size());
  detail::parallel_for(a.images.size(), a.threads, [&](std::size_t i) {
    rows[i].inertia = image_inertia(load_gray_image(a.images[i]), cfg);
    rows[i].p = predict(model, rows[i].inertia);
  });

  detail::OutputTarget target(a.out, out);
  auto& os = target.stream();
  os << "path,inertia,s,concentration_mg_m3,out_of_range\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << a.images[i] << ',' << rows[i].inertia << ',' << rows[i].p.s << ',' << rows[i].p.concentration << ','
       << (rows[i].p.out_of_range ? 1 : 0) << '\n';
  }
  return kOk;
}

struct SweepArgs {
  std::string corpus_csv;
  std::vector<int> windows{3, 5, 7, 9};
  std::string out;
  PipelineConfig config;
  double fitting_fraction = 9.0 / 21.0;
};

inline int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  const auto table = read_sample_csv(a.corpus_csv);
  if (table.kind != SampleTable::Kind::Images) {
    throw Error(Errc::MalformedCsv, "sweep needs an image corpus (" + std::string(kImageCsvHeader) + ")");
  }
  const auto corpus = detail::load_corpus(table);
  const auto report = window_sweep(corpus, a.windows, SplitRule{a.fitting_fraction}, a.config);

  detail::OutputTarget target(a.out, out);
  write_sweep_csv(target.stream(), report);
  bool any_ok = false;
  for (const auto& r : report.rows) {
    any_ok = any_ok || r.ok;
    if (!r.ok) err << "window " << r.window << " failed: " << r.failure << '\n';
  }
  return any_ok ? kOk : kDataError;
}

struct GrcmDumpArgs {
  std::string image;
  std::string out;
  std::string rank_pgm;
  PipelineConfig config;
};

inline int cmd_grcm_dump(const GrcmDumpArgs& a, std::ostream& out) {
  const auto result = run_pipeline(load_gray_image(a.image), a.config);
  write_grcm_csv(a.out + ".csv", result.grcm);
  write_grcm_pgm(a.out + ".pgm", result.grcm);
  if (!a.rank_pgm.empty()) write_rank_pgm(a.rank_pgm, result.ranks);
  const auto prec = out.precision(std::numeric_limits<double>::max_digits10);
  out << "inertia " << result.inertia << '\n';
  out.precision(prec);
  return kOk;
}

/// Parses `argv` and dispatches to one subcommand.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Dust concentration from the moment of inertia of a gray level-rank co-occurrence matrix"};
  app.name("dustgrcm");
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dust corpus (PGM images + manifest.csv)");
  gen_cmd->add_option("--densities", gen.densities, "Particles per 1000 px, comma separated")
      ->required()
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--seed", gen.seed, "Base seed; image k uses seed + k")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--width", gen.scene.width)->capture_default_str();
  gen_cmd->add_option("--height", gen.scene.height)->capture_default_str();
  gen_cmd->add_option("--mg-per-density", gen.map.slope, "Label slope, mg/m3 per density unit")
      ->capture_default_str();
  gen_cmd->add_option("--mg-offset", gen.map.offset, "Label offset, mg/m3")->capture_default_str();

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Fit a concentration model from labeled samples");
  cal_cmd->add_option("samples", cal.samples_csv, "Sample CSV (path or inertia column)")->required();
  cal_cmd->add_option("--out", cal.model_out, "Model file to write")->required();
  cal_cmd->add_option("--dust-type", cal.dust_type)->capture_default_str();
  cal_cmd->add_option("--threads", cal.threads)->check(CLI::PositiveNumber);
  detail::add_pipeline_flags(cal_cmd, cal.config);

  MeasureArgs meas;
  auto* meas_cmd = app.add_subcommand("measure", "Estimate concentration for images with a fitted model");
  meas_cmd->add_option("images", meas.images, "PGM images")->required();
  meas_cmd->add_option("--model", meas.model, "Model file")->required();
  meas_cmd->add_option("--out", meas.out, "CSV output (default stdout)");
  meas_cmd->add_option("--threads", meas.threads)->check(CLI::PositiveNumber);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Compare accuracy and speed across window sizes");
  sweep_cmd->add_option("corpus", sweep.corpus_csv, "Image corpus CSV")->required();
  sweep_cmd->add_option("--windows", sweep.windows, "Window sizes, comma separated")
      ->delimiter(',')
      ->check(detail::kOddWindow)
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "CSV output (default stdout)");
  sweep_cmd->add_option("--fitting-fraction", sweep.fitting_fraction)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sweep_cmd->add_option("--rank-levels", sweep.config.rank_levels)->check(CLI::Range(1, 255))->capture_default_str();
  sweep_cmd->add_option("--gray-levels", sweep.config.gray_levels)->check(CLI::Range(1, 256))->capture_default_str();

  GrcmDumpArgs dump;
  auto* dump_cmd = app.add_subcommand("grcm-dump", "Write GRCM counts (CSV) and heat image (PGM) for one image");
  dump_cmd->add_option("image", dump.image, "PGM image")->required();
  dump_cmd->add_option("--out", dump.out, "Output prefix; writes <prefix>.csv and <prefix>.pgm")->required();
  dump_cmd->add_option("--rank-pgm", dump.rank_pgm, "Also write the rank-level matrix as PGM");
  detail::add_pipeline_flags(dump_cmd, dump.config);

  try {
    app.parse(argc, argv);
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*cal_cmd) return cmd_calibrate(cal, out, err);
    if (*meas_cmd) return cmd_measure(meas, out);
    if (*sweep_cmd) return cmd_sweep(sweep, out, err);
    if (*dump_cmd) return cmd_grcm_dump(dump, out);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace dustgrcm::cli
