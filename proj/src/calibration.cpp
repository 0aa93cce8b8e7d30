#include "qhyst/calibration.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "qhyst/errors.hpp"
#include "qhyst/run_io.hpp"

namespace qhyst {

const Calibration& builtin_calibration() {
  static const Calibration c{};
  return c;
}

std::string serialize_calibration(const Calibration& c) {
  std::ostringstream out;
  out << "# qhyst calibration (bistable working point of the box model)\n";
  out << "version = " << c.version << "\n";
  out << "gamma = " << format_full(c.gamma) << "\n";
  out << "box_a = " << format_full(c.box_a) << "\n";
  out << "n_grid = " << c.n_grid << "\n";
  out << "n_coeffs = " << c.n_coeffs << "\n";
  out << "strong_beta = " << format_full(c.strong_beta) << "\n";
  out << "half_strong_beta = " << format_full(c.half_strong_beta) << "\n";
  out << "v_max = " << format_full(c.v_max) << "\n";
  out << "linear_v_max = " << format_full(c.linear_v_max) << "\n";
  out << "t0 = " << format_full(c.t0) << "\n";
  out << "area_floor = " << format_full(c.area_floor) << "\n";
  return out.str();
}

Calibration parse_calibration(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  auto need = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw ValidationError("calibration: missing key '" + key + "'");
    return it->second;
  };

  Calibration c;
  c.version = std::stoi(need("version"));
  c.gamma = std::stod(need("gamma"));
  c.box_a = std::stod(need("box_a"));
  c.n_grid = std::stoi(need("n_grid"));
  c.n_coeffs = std::stoi(need("n_coeffs"));
  c.strong_beta = std::stod(need("strong_beta"));
  c.half_strong_beta = std::stod(need("half_strong_beta"));
  c.v_max = std::stod(need("v_max"));
  c.linear_v_max = std::stod(need("linear_v_max"));
  c.t0 = std::stod(need("t0"));
  c.area_floor = std::stod(need("area_floor"));
  return c;
}

Calibration load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("calibration: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_calibration(buffer.str());
}

void save_calibration(const Calibration& c, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_calibration(c));
}

}  // namespace qhyst
