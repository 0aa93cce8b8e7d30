#include "qhyst/run_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qhyst/errors.hpp"

namespace qhyst {

std::string format_full(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ChainError("io: cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ChainError("io: short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("io: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

CsvBuilder::CsvBuilder(std::vector<std::string> columns)
    : columns_(columns.size()) {
  if (columns.empty()) throw ValidationError("csv: empty header");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) text_ += ',';
    text_ += columns[i];
  }
  text_ += '\n';
}

void CsvBuilder::row(std::span<const std::string> cells) {
  if (cells.size() != columns_)
    throw ValidationError("csv: row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

void CsvBuilder::comment(const std::string& key, const std::string& value) {
  text_ += "# " + key + " = " + value + "\n";
}

std::string bool_name(bool v) { return v ? "true" : "false"; }

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    return cells;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::size_t eq = line.find('=');
      if (eq != std::string::npos) {
        auto trim = [](std::string s) {
          const auto b = s.find_first_not_of(" \t#");
          const auto e = s.find_last_not_of(" \t");
          return b == std::string::npos ? std::string{}
                                        : s.substr(b, e - b + 1);
        };
        table.footer.emplace_back(trim(line.substr(0, eq)),
                                  trim(line.substr(eq + 1)));
      }
      continue;
    }
    if (!have_header) {
      table.columns = split(line);
      have_header = true;
    } else {
      table.rows.push_back(split(line));
    }
  }
  return table;
}

void write_coefficients_csv(const std::filesystem::path& path,
                            const FourierCoefficients& coeffs) {
  coeffs.validate();
  CsvBuilder csv({"family", "n", "value"});
  for (int n = 0; n < coeffs.modes(); ++n) {
    const std::string cells[] = {"cos", std::to_string(n),
                                 format_full(coeffs.a_n[n])};
    csv.row(cells);
  }
  for (int n = 0; n < coeffs.modes(); ++n) {
    const std::string cells[] = {"sin", std::to_string(n),
                                 format_full(coeffs.b_n[n])};
    csv.row(cells);
  }
  write_file_atomic(path, csv.text());
}

FourierCoefficients read_coefficients_csv(const std::filesystem::path& path) {
  const CsvTable table = parse_csv(read_file(path));
  if (table.columns != std::vector<std::string>{"family", "n", "value"})
    throw ValidationError("coefficients: unexpected header in " + path.string());
  std::vector<double> a, b;
  for (const auto& row : table.rows) {
    if (row.size() != 3)
      throw ValidationError("coefficients: malformed row in " + path.string());
    const int n = std::stoi(row[1]);
    std::vector<double>& family = row[0] == "cos" ? a : b;
    if (row[0] != "cos" && row[0] != "sin")
      throw ValidationError("coefficients: unknown family " + row[0]);
    if (static_cast<int>(family.size()) != n)
      throw ValidationError("coefficients: rows out of order in " + path.string());
    family.push_back(std::stod(row[2]));
  }
  if (a.size() != b.size())
    throw ValidationError("coefficients: families differ in length");
  FourierCoefficients coeffs{std::move(a), std::move(b)};
  coeffs.validate();
  return coeffs;
}

std::string RunManifest::serialize() const {
  std::ostringstream out;
  out << "# qhyst run manifest\n";
  out << "# command = " << command << "\n";
  out << "# artifact_version = " << artifact_version << "\n";
  out << "# calibration_version = " << calibration_version << "\n";
  out << "# duration_seconds = " << format_full(duration_seconds) << "\n";
  for (const std::string& name : outputs) out << "# output = " << name << "\n";
  out << "seed = " << seed << "\n";
  for (const auto& [key, value] : parameters)
    out << key << " = " << value << "\n";
  return out.str();
}

namespace {

std::string px(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  return buffer;
}

}  // namespace

std::string render_svg(std::span<const double> control,
                       std::span<const double> response,
                       std::span<const int> legs, const std::string& x_label,
                       const std::string& y_label) {
  if (control.empty() || control.size() != response.size() ||
      control.size() != legs.size())
    throw ValidationError("svg: empty or mismatched series");

  double v_lo = control[0], v_hi = control[0];
  double r_lo = response[0], r_hi = response[0];
  for (std::size_t i = 0; i < control.size(); ++i) {
    v_lo = std::min(v_lo, control[i]);
    v_hi = std::max(v_hi, control[i]);
    r_lo = std::min(r_lo, response[i]);
    r_hi = std::max(r_hi, response[i]);
  }
  if (v_hi == v_lo) v_hi = v_lo + 1.0;
  const double r_pad = std::max(0.05, 0.1 * (r_hi - r_lo));
  r_lo -= r_pad;
  r_hi += r_pad;

  const double x0 = 80.0, x1 = 770.0, y0 = 550.0, y1 = 40.0;
  auto map_x = [&](double v) { return x0 + (v - v_lo) / (v_hi - v_lo) * (x1 - x0); };
  auto map_y = [&](double r) { return y0 + (r - r_lo) / (r_hi - r_lo) * (y1 - y0); };

  static const char* kColors[] = {"#888888", "#1f5fbf", "#bf3f1f", "#2f8f4f",
                                  "#8f2f8f"};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(x1)
      << "\" y2=\"" << px(y0) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(x0)
      << "\" y2=\"" << px(y1) << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << px(0.5 * (x0 + x1)) << "\" y=\"585\" font-size=\"16\" "
         "text-anchor=\"middle\">" << x_label << "</text>\n";
  out << "<text x=\"20\" y=\"" << px(0.5 * (y0 + y1))
      << "\" font-size=\"16\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << px(0.5 * (y0 + y1)) << ")\">" << y_label << "</text>\n";
  for (const double tick : {v_lo, 0.5 * (v_lo + v_hi), v_hi}) {
    out << "<text x=\"" << px(map_x(tick)) << "\" y=\"570\" font-size=\"12\" "
           "text-anchor=\"middle\">" << format_full(tick) << "</text>\n";
  }
  for (const double tick : {r_lo, 0.5 * (r_lo + r_hi), r_hi}) {
    out << "<text x=\"" << px(x0 - 8.0) << "\" y=\"" << px(map_y(tick))
        << "\" font-size=\"12\" text-anchor=\"end\">" << format_full(tick)
        << "</text>\n";
  }

  std::size_t i = 0;
  while (i < control.size()) {
    const int leg = legs[i];
    out << "<polyline fill=\"none\" stroke=\""
        << kColors[static_cast<std::size_t>(leg) % 5] << "\" stroke-width=\"2\" points=\"";
    // Legs share their boundary point so the polylines connect.
    if (i > 0) out << px(map_x(control[i - 1])) << ',' << px(map_y(response[i - 1])) << ' ';
    while (i < control.size() && legs[i] == leg) {
      out << px(map_x(control[i])) << ',' << px(map_y(response[i]));
      ++i;
      if (i < control.size() && legs[i] == leg) out << ' ';
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace qhyst
