#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "dustgrcm/calibration.hpp"
#include "dustgrcm/error.hpp"

namespace dustgrcm {

/// Image path with its reference concentration, as listed in a corpus manifest.
struct ManifestEntry {
  std::filesystem::path path;
  double concentration = 0.0;
};

/// Parsed sample CSV. Exactly one of `images` / `features` is populated,
/// depending on the header (`path,...` or `inertia,...`).
struct SampleTable {
  enum class Kind { Images, Features };
  Kind kind = Kind::Images;
  std::vector<ManifestEntry> images;
  std::vector<CalibrationSample> features;
};

inline constexpr const char* kImageCsvHeader = "path,concentration_mg_m3";
inline constexpr const char* kFeatureCsvHeader = "inertia,concentration_mg_m3";

namespace detail {

inline std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& field, const std::string& where) {
  double v = 0.0;
  const auto t = trim(field);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw Error(Errc::MalformedCsv, where + ": not a number '" + field + "'");
  }
  return v;
}

}  // namespace detail

/// Reads a sample CSV. Relative image paths resolve against the CSV's directory.
inline SampleTable read_sample_csv(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) {
    throw Error(Errc::FileNotFound, csv.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(Errc::MalformedCsv, csv.string() + ": empty file");
  }
  SampleTable table;
  const auto header = detail::trim(line);
  if (header == kImageCsvHeader) {
    table.kind = SampleTable::Kind::Images;
  } else if (header == kFeatureCsvHeader) {
    table.kind = SampleTable::Kind::Features;
  } else {
    throw Error(Errc::MalformedCsv, csv.string() + ": unexpected header '" + header + "'");
  }

  const auto base = csv.parent_path();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto where = csv.string() + ":" + std::to_string(line_no);
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw Error(Errc::MalformedCsv, where + ": expected two fields");
    }
    const auto first = detail::trim(line.substr(0, comma));
    const double conc = detail::parse_double(line.substr(comma + 1), where);
    if (table.kind == SampleTable::Kind::Images) {
      std::filesystem::path p(first);
      if (p.is_relative()) p = base / p;
      table.images.push_back({p, conc});
    } else {
      table.features.push_back({detail::parse_double(first, where), conc});
    }
  }
  return table;
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  }
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

inline void write_manifest_csv(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
  auto out = open_for_write(path);
  out << kImageCsvHeader << '\n';
  for (const auto& e : entries) out << e.path.generic_string() << ',' << e.concentration << '\n';
}

inline void write_feature_csv(const std::filesystem::path& path, const std::vector<CalibrationSample>& samples) {
  auto out = open_for_write(path);
  out << kFeatureCsvHeader << '\n';
  for (const auto& s : samples) out << s.inertia << ',' << s.standard_concentration << '\n';
}

inline void write_error_report_csv(std::ostream& out, const ErrorReport& report) {
  out << "inertia,standard_mg_m3,predicted_mg_m3,relative_error_pct\n";
  for (const auto& r : report.rows) {
    out << r.inertia << ',' << r.standard << ',' << r.predicted << ',' << r.relative_error_percent << '\n';
  }
}

}  // namespace dustgrcm
