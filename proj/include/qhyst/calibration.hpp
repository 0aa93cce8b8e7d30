#pragma once

#include <filesystem>
#include <string>

namespace qhyst {

// Bistable working point of the box model. The stock functional with the
// usual normalization does not self-trap at desk-scale beta, so the working
// point is calibrated: the shipped values come from the calibrate subcommand
// (a bifurcation scan) and live in data/calibration.cfg. The constants here
// mirror that file; a test keeps the two in sync.
struct Calibration {
  int version = 1;
  double gamma = -1.0;
  double box_a = 0.5;
  int n_grid = 512;
  int n_coeffs = 20;
  double strong_beta = -120.0;
  double half_strong_beta = -60.0;
  double v_max = 60.0;         // cycle amplitude at the bistable point
  double linear_v_max = 60.0;  // amplitude with visible saturation at beta = 0
  double t0 = 0.05;
  double area_floor = 10.0;    // probe-loop area a bistable point must clear
};

const Calibration& builtin_calibration();

std::string serialize_calibration(const Calibration& c);
Calibration parse_calibration(const std::string& text);
Calibration load_calibration(const std::filesystem::path& path);
void save_calibration(const Calibration& c, const std::filesystem::path& path);

}  // namespace qhyst
