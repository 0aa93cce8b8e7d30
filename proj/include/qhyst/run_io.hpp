#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qhyst/wavefunction.hpp"

namespace qhyst {

// Shortest decimal string that round-trips the double (up to 17 significant
// digits), locale independent.
std::string format_full(double value);

// Write-then-rename so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

std::string read_file(const std::filesystem::path& path);

// Minimal CSV buffer: header row, data rows, trailing '#' comment lines.
class CsvBuilder {
 public:
  explicit CsvBuilder(std::vector<std::string> columns);
  void row(std::span<const std::string> cells);
  void comment(const std::string& key, const std::string& value);
  const std::string& text() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

std::string bool_name(bool v);

// Parses numeric CSV produced by CsvBuilder (comments skipped). Used by the
// coefficient reload path and by tests.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> footer;
};
CsvTable parse_csv(const std::string& text);

void write_coefficients_csv(const std::filesystem::path& path,
                            const FourierCoefficients& coeffs);
FourierCoefficients read_coefficients_csv(const std::filesystem::path& path);

// Reproducibility record written beside every command's outputs. The body is
// config-file compatible (`key = value`), so a run can be replayed with
//   qhyst <command> --config <manifest> --out-dir <elsewhere>
// and must reproduce each listed output byte for byte.
struct RunManifest {
  std::string command;
  std::string artifact_version;
  int calibration_version = 0;
  std::uint64_t seed = 0;
  double duration_seconds = 0.0;
  std::vector<std::string> outputs;  // basenames
  std::vector<std::pair<std::string, std::string>> parameters;  // resolved

  std::string serialize() const;
};

// Polyline plot of response vs control, one polyline per leg, fixed 800x600
// viewBox, no timestamps; identical inputs give identical bytes.
std::string render_svg(std::span<const double> control,
                       std::span<const double> response,
                       std::span<const int> legs, const std::string& x_label,
                       const std::string& y_label);

}  // namespace qhyst
