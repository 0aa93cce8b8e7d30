#include "qhyst/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "qhyst/annealer.hpp"
#include "qhyst/calibration.hpp"
#include "qhyst/dimer.hpp"
#include "qhyst/hysteresis.hpp"
#include "qhyst/run_io.hpp"
#include "qhyst/version.hpp"
#include "qhyst/wavefunction.hpp"

namespace qhyst::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// ---------------------------------------------------------------------------
// Shared plumbing

std::string find_preset(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--preset" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--preset=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

int parse_args(CLI::App& app, const std::string& command,
               const std::vector<std::string>& args, int& exit_code) {
  std::vector<std::string> argv_store;
  argv_store.push_back("qhyst " + command);
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  argv.reserve(argv_store.size());
  for (std::string& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    exit_code = 0;
    return 1;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    exit_code = 2;
    return 1;
  }
  return 0;
}

struct ParamList {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(const std::string& key, double v) { entries.emplace_back(key, format_full(v)); }
  void add(const std::string& key, int v) { entries.emplace_back(key, std::to_string(v)); }
  void add(const std::string& key, bool v) { entries.emplace_back(key, bool_name(v)); }
  void add(const std::string& key, const std::string& v) { entries.emplace_back(key, v); }
};

int write_outputs(const std::string& command, const std::string& out_dir,
                  std::uint64_t seed, const ParamList& params,
                  const std::vector<std::pair<std::string, std::string>>& files,
                  Clock::time_point started) {
  fs::path dir(out_dir);
  if (!dir.empty()) fs::create_directories(dir);
  for (const auto& [name, content] : files)
    write_file_atomic(dir / name, content);

  RunManifest manifest;
  manifest.command = command;
  manifest.artifact_version = kVersion;
  manifest.calibration_version = builtin_calibration().version;
  manifest.seed = seed;
  manifest.duration_seconds =
      std::chrono::duration<double>(Clock::now() - started).count();
  for (const auto& [name, content] : files) manifest.outputs.push_back(name);
  manifest.parameters = params.entries;

  std::string manifest_name = command;
  for (char& c : manifest_name)
    if (c == '-') c = '_';
  write_file_atomic(dir / (manifest_name + ".manifest.txt"),
                    manifest.serialize());
  return 0;
}

void add_common(CLI::App& app, std::string& out_dir, std::string& preset,
                std::uint64_t& seed) {
  app.add_option("--out-dir", out_dir, "Output directory")
      ->envname("QHYST_OUT_DIR")
      ->capture_default_str();
  app.add_option("--preset", preset, "Named parameter bundle");
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  app.set_config("--config", "", "Key = value file merged under explicit flags");
}

std::vector<double> parse_beta_list(const std::string& text) {
  std::vector<double> betas;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    betas.push_back(std::stod(item));
  }
  return betas;
}

AnnealSchedule make_ladder(const std::string& kind, int n_temps, int cycles,
                           std::uint64_t seed) {
  if (kind == "linear") return AnnealSchedule::linear(n_temps, cycles, seed);
  if (kind == "geometric")
    return AnnealSchedule::geometric(n_temps, 1.0, 0.02, cycles, seed);
  throw ValidationError("--ladder must be 'linear' or 'geometric'");
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_full(*v) : "nan";
}

void loop_footer(CsvBuilder& csv, const LoopSummary& summary) {
  csv.comment("threshold_up", optional_cell(summary.threshold_up));
  csv.comment("threshold_down", optional_cell(summary.threshold_down));
  csv.comment("loop_area", format_full(summary.loop_area));
  csv.comment("jumped_up", bool_name(summary.jumped_up));
  csv.comment("jumped_down", bool_name(summary.jumped_down));
  csv.comment("ambiguous", bool_name(summary.ambiguous));
}

// ---------------------------------------------------------------------------
// dimer-ground

struct DimerGroundParams {
  double u = 1.0;
  double eps = 0.0;
  double ratio_max = 1.5;
  double ratio_step = 0.1;
  int temps = 20;
  int cycles = 2000;
  std::string ladder = "linear";
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string preset;
};

void apply_preset(DimerGroundParams& p, const std::string& preset) {
  if (preset.empty()) return;
  if (preset == "fig1") {
    p.u = 1.0;
    p.eps = 0.0;
    p.ratio_max = 1.5;
    p.ratio_step = 0.1;
    p.temps = 20;
    p.cycles = 2000;
    p.seed = 11;
    return;
  }
  throw ValidationError("unknown preset for dimer-ground: " + preset);
}

int cmd_dimer_ground(const std::vector<std::string>& args) {
  DimerGroundParams p;
  apply_preset(p, find_preset(args));

  CLI::App app{"Dimer ground-state asymmetry over a t/U grid"};
  add_common(app, p.out_dir, p.preset, p.seed);
  app.add_option("--u", p.u, "Self-trapping strength U")->capture_default_str();
  app.add_option("--eps", p.eps, "Common site energy")->capture_default_str();
  app.add_option("--ratio-max", p.ratio_max, "Largest t/U")->capture_default_str();
  app.add_option("--ratio-step", p.ratio_step, "t/U grid step")->capture_default_str();
  app.add_option("--temps", p.temps, "Ladder length")->capture_default_str();
  app.add_option("--cycles-per-temp", p.cycles, "Sweeps per temperature")
      ->capture_default_str();
  app.add_option("--ladder", p.ladder, "linear|geometric")->capture_default_str();

  int rc = 0;
  if (parse_args(app, "dimer-ground", args, rc)) return rc;
  const auto started = Clock::now();

  if (!(p.u > 0.0)) throw ValidationError("--u must be > 0 for a t/U grid");
  if (!(p.ratio_step > 0.0)) throw ValidationError("--ratio-step must be > 0");
  if (!(p.ratio_max >= 0.0)) throw ValidationError("--ratio-max must be >= 0");

  CsvBuilder csv({"t_over_u", "s_closed_form", "s_numeric", "energy"});
  for (int k = 0;; ++k) {
    const double ratio = k * p.ratio_step;
    if (ratio > p.ratio_max + 1e-12) break;
    DimerParams dimer{p.eps, p.eps, ratio * p.u, p.u};
    AnnealSchedule schedule =
        make_ladder(p.ladder, p.temps, p.cycles, mix_seed(p.seed, k));
    const DimerAmplitudes state = ground_state_numeric(dimer, schedule);
    const std::string cells[] = {
        format_full(ratio), format_full(ground_state_closed_form(dimer)),
        format_full(asymmetry(state)), format_full(dimer_energy(dimer, state))};
    csv.row(cells);
  }

  ParamList params;
  params.add("u", p.u);
  params.add("eps", p.eps);
  params.add("ratio-max", p.ratio_max);
  params.add("ratio-step", p.ratio_step);
  params.add("temps", p.temps);
  params.add("cycles-per-temp", p.cycles);
  params.add("ladder", p.ladder);
  return write_outputs("dimer-ground", p.out_dir, p.seed, params,
                       {{"dimer_ground.csv", csv.text()}}, started);
}

// ---------------------------------------------------------------------------
// dimer-hysteresis

struct DimerHysteresisParams {
  double u = 1.0;
  double t = 0.0;
  double eps1 = 0.0;
  double eps2_max = 3.0;
  int steps_per_leg = 50;
  int sweeps_per_step = 200;
  double t0 = 1e-4;
  double jump_min = 0.5;
  int start_site = 1;
  bool mirror = false;
  int temps = 20;
  int cycles = 2000;
  std::uint64_t seed = 2;
  std::string out_dir = ".";
  std::string preset;
};

void apply_preset(DimerHysteresisParams& p, const std::string& preset) {
  if (preset.empty()) return;
  if (preset == "fig2") {
    p.u = 1.0;
    p.t = 0.0;
    p.eps1 = 0.0;
    p.eps2_max = 3.0;
    p.steps_per_leg = 50;
    p.sweeps_per_step = 200;
    p.t0 = 1e-4;
    p.seed = 22;
    return;
  }
  throw ValidationError("unknown preset for dimer-hysteresis: " + preset);
}

int cmd_dimer_hysteresis(const std::vector<std::string>& args) {
  DimerHysteresisParams p;
  apply_preset(p, find_preset(args));

  CLI::App app{"Adiabatic bias sweep of the dimer with hysteresis extraction"};
  add_common(app, p.out_dir, p.preset, p.seed);
  app.add_option("--u", p.u, "Self-trapping strength U")->capture_default_str();
  app.add_option("--t", p.t, "Hopping magnitude")->capture_default_str();
  app.add_option("--eps1", p.eps1, "Donor site energy")->capture_default_str();
  app.add_option("--eps2-max", p.eps2_max, "Sweep turning magnitude")
      ->capture_default_str();
  app.add_option("--steps-per-leg", p.steps_per_leg, "Steps per sweep leg")
      ->capture_default_str();
  app.add_option("--sweeps-per-step", p.sweeps_per_step, "Hold sweeps per step")
      ->capture_default_str();
  app.add_option("--t0", p.t0, "Hold temperature")->capture_default_str();
  app.add_option("--jump-min", p.jump_min, "Jump detection threshold")
      ->capture_default_str();
  app.add_option("--start-site", p.start_site, "Initially occupied site (1|2)")
      ->capture_default_str();
  app.add_flag("--mirror", p.mirror, "Run the exact parity conjugate");
  app.add_option("--temps", p.temps, "Preparation ladder length")
      ->capture_default_str();
  app.add_option("--cycles-per-temp", p.cycles, "Preparation sweeps per temperature")
      ->capture_default_str();

  int rc = 0;
  if (parse_args(app, "dimer-hysteresis", args, rc)) return rc;
  const auto started = Clock::now();

  if (p.start_site != 1 && p.start_site != 2)
    throw ValidationError("--start-site must be 1 or 2");
  if (!(p.eps2_max > 0.0)) throw ValidationError("--eps2-max must be > 0");

  double hi = p.eps2_max, lo = -p.eps2_max;
  Site start = p.start_site == 1 ? Site::donor : Site::acceptor;
  if (p.mirror) {
    std::swap(hi, lo);
    start = start == Site::donor ? Site::acceptor : Site::donor;
  }
  const std::vector<double> schedule = bias_schedule(hi, lo, p.steps_per_leg);

  DimerParams dimer{p.eps1, schedule.front(), p.t, p.u};
  BiasSweepOptions options;
  options.start_site = start;
  options.sweeps_per_step = p.sweeps_per_step;
  options.prep = AnnealSchedule::linear(p.temps, p.cycles);
  const DimerSweepTrace trace =
      bias_sweep(dimer, schedule, p.t0, p.seed, options);

  CsvBuilder csv({"eps2", "s_signed", "energy", "leg"});
  std::vector<double> control, response;
  std::vector<int> legs;
  for (const DimerSweepPoint& point : trace.points) {
    const std::string cells[] = {format_full(point.eps2), format_full(point.s),
                                 format_full(point.energy),
                                 std::to_string(point.leg)};
    csv.row(cells);
    control.push_back(point.eps2);
    response.push_back(point.s);
    legs.push_back(point.leg);
  }
  loop_footer(csv, extract_thresholds(control, response, legs, p.jump_min));

  ParamList params;
  params.add("u", p.u);
  params.add("t", p.t);
  params.add("eps1", p.eps1);
  params.add("eps2-max", p.eps2_max);
  params.add("steps-per-leg", p.steps_per_leg);
  params.add("sweeps-per-step", p.sweeps_per_step);
  params.add("t0", p.t0);
  params.add("jump-min", p.jump_min);
  params.add("start-site", p.start_site);
  params.add("mirror", p.mirror);
  params.add("temps", p.temps);
  params.add("cycles-per-temp", p.cycles);
  return write_outputs("dimer-hysteresis", p.out_dir, p.seed, params,
                       {{"dimer_hysteresis.csv", csv.text()}}, started);
}

// ---------------------------------------------------------------------------
// box-anneal

struct BoxAnnealParams {
  double gamma = -1.0;
  double beta = 0.0;
  double v0 = 0.0;
  double box_a = 0.5;
  int n_grid = 512;
  int n_coeffs = 20;
  int temps = 20;
  int cycles = 10000;
  std::string ladder = "linear";
  bool doubling = false;
  std::uint64_t seed = 3;
  std::string out_dir = ".";
  std::string preset;
};

void apply_preset(BoxAnnealParams& p, const std::string& preset) {
  if (preset.empty()) return;
  if (preset == "fig3") {
    p.gamma = -1.0;
    p.beta = -0.1;
    p.box_a = 0.5;
    p.n_grid = 512;
    p.n_coeffs = 20;
    p.temps = 20;
    p.cycles = 10000;
    p.seed = 33;
    return;
  }
  if (preset == "fig3-calibrated") {
    const Calibration& cal = builtin_calibration();
    p.gamma = cal.gamma;
    p.beta = cal.strong_beta;
    p.box_a = cal.box_a;
    p.n_grid = cal.n_grid;
    p.n_coeffs = cal.n_coeffs;
    p.temps = 20;
    p.cycles = 1500;
    p.seed = 33;
    return;
  }
  throw ValidationError("unknown preset for box-anneal: " + preset);
}

int cmd_box_anneal(const std::vector<std::string>& args) {
  BoxAnnealParams p;
  apply_preset(p, find_preset(args));

  CLI::App app{"Annealed ground state of the box functional"};
  add_common(app, p.out_dir, p.preset, p.seed);
  app.add_option("--gamma", p.gamma, "Kinetic coefficient (< 0)")
      ->capture_default_str();
  app.add_option("--beta", p.beta, "Self-trapping coefficient (<= 0)")
      ->capture_default_str();
  app.add_option("--v0", p.v0, "Tilt amplitude during the anneal")
      ->capture_default_str();
  app.add_option("--box-a", p.box_a, "Box length")->capture_default_str();
  app.add_option("--n-grid", p.n_grid, "Quadrature points (power of two)")
      ->capture_default_str();
  app.add_option("--n-coeffs", p.n_coeffs, "Modes per family")
      ->capture_default_str();
  app.add_option("--temps", p.temps, "Ladder length")->capture_default_str();
  app.add_option("--cycles-per-temp", p.cycles, "Sweeps per temperature")
      ->capture_default_str();
  app.add_option("--ladder", p.ladder, "linear|geometric")->capture_default_str();
  app.add_flag("--doubling", p.doubling,
               "Append a coefficient-doubling convergence report");

  int rc = 0;
  if (parse_args(app, "box-anneal", args, rc)) return rc;
  const auto started = Clock::now();

  EnergyModel model{p.gamma, p.beta, p.v0, {p.box_a, p.n_grid}};
  model.validate();
  AnnealSchedule schedule = make_ladder(p.ladder, p.temps, p.cycles, p.seed);

  BoxObjective objective(model, p.n_coeffs);
  Rng init_rng = Rng::stream(p.seed, 0xE0);
  ChainState chain =
      make_chain(objective, random_coefficient_vector(p.n_coeffs, init_rng),
                 mix_seed(p.seed, 0xE1));
  anneal(chain, objective, schedule);

  CsvBuilder csv({"final_energy", "x_mean"});
  const std::string cells[] = {format_full(chain.energy),
                               format_full(objective.expectation_x_over_a())};
  csv.row(cells);

  if (p.doubling) {
    DoublingProblem problem;
    problem.make_objective = [model](int m) {
      return std::make_unique<BoxObjective>(model, m);
    };
    problem.make_initial = [](int m, Rng& rng) {
      return random_coefficient_vector(m, rng);
    };
    problem.observable = [](Objective& objective, std::span<const double>) {
      return static_cast<BoxObjective&>(objective).expectation_x_over_a();
    };
    const ConvergenceReport report =
        convergence_check(problem, schedule, p.n_coeffs);
    csv.comment("m_small", std::to_string(report.m_small));
    csv.comment("m_large", std::to_string(report.m_large));
    csv.comment("e_small", format_full(report.e_small));
    csv.comment("e_large", format_full(report.e_large));
    csv.comment("observable_small", format_full(report.observable_small));
    csv.comment("observable_large", format_full(report.observable_large));
    csv.comment("relative_delta", format_full(report.relative_delta));
  }

  std::ostringstream coeff_csv;
  {
    CsvBuilder builder({"family", "n", "value"});
    const FourierCoefficients coeffs = objective.coefficients();
    for (int n = 0; n < coeffs.modes(); ++n) {
      const std::string row[] = {"cos", std::to_string(n),
                                 format_full(coeffs.a_n[n])};
      builder.row(row);
    }
    for (int n = 0; n < coeffs.modes(); ++n) {
      const std::string row[] = {"sin", std::to_string(n),
                                 format_full(coeffs.b_n[n])};
      builder.row(row);
    }
    coeff_csv << builder.text();
  }

  ParamList params;
  params.add("gamma", p.gamma);
  params.add("beta", p.beta);
  params.add("v0", p.v0);
  params.add("box-a", p.box_a);
  params.add("n-grid", p.n_grid);
  params.add("n-coeffs", p.n_coeffs);
  params.add("temps", p.temps);
  params.add("cycles-per-temp", p.cycles);
  params.add("ladder", p.ladder);
  params.add("doubling", p.doubling);
  return write_outputs("box-anneal", p.out_dir, p.seed, params,
                       {{"box_anneal.csv", csv.text()},
                        {"box_coefficients.csv", coeff_csv.str()}},
                       started);
}

// ---------------------------------------------------------------------------
// box-hysteresis

struct BoxHysteresisParams {
  double gamma = -1.0;
  double beta = 0.0;
  double v_max = 60.0;
  double box_a = 0.5;
  int n_grid = 512;
  int n_coeffs = 20;
  int steps_per_leg = 50;
  int sweeps_per_step = 200;
  double t0 = 0.05;
  double jump_min = 0.2;
  std::string start_side = "left";
  bool mirror = false;
  bool svg = false;
  int temps = 20;
  int cycles = 1500;
  std::uint64_t seed = 4;
  std::string out_dir = ".";
  std::string preset;
};

void apply_preset(BoxHysteresisParams& p, const std::string& preset) {
  if (preset.empty()) return;
  const Calibration& cal = builtin_calibration();
  if (preset == "fig3") {
    p.gamma = -1.0;
    p.beta = -0.1;
    p.box_a = 0.5;
    p.n_grid = 512;
    p.n_coeffs = 20;
    p.v_max = cal.linear_v_max;
    p.steps_per_leg = 50;
    p.sweeps_per_step = 200;
    p.t0 = 0.05;
    p.temps = 20;
    p.cycles = 10000;
    p.seed = 34;
    return;
  }
  if (preset == "fig3-calibrated") {
    p.gamma = cal.gamma;
    p.beta = cal.strong_beta;
    p.box_a = cal.box_a;
    p.n_grid = cal.n_grid;
    p.n_coeffs = cal.n_coeffs;
    p.v_max = cal.v_max;
    p.steps_per_leg = 50;
    p.sweeps_per_step = 200;
    p.t0 = cal.t0;
    p.temps = 20;
    p.cycles = 1500;
    p.seed = 34;
    return;
  }
  throw ValidationError("unknown preset for box-hysteresis: " + preset);
}

int cmd_box_hysteresis(const std::vector<std::string>& args) {
  BoxHysteresisParams p;
  apply_preset(p, find_preset(args));

  CLI::App app{"Full tilt cycle over the box model"};
  add_common(app, p.out_dir, p.preset, p.seed);
  app.add_option("--gamma", p.gamma, "Kinetic coefficient (< 0)")
      ->capture_default_str();
  app.add_option("--beta", p.beta, "Self-trapping coefficient (<= 0)")
      ->capture_default_str();
  app.add_option("--v-max", p.v_max, "Cycle amplitude")->capture_default_str();
  app.add_option("--box-a", p.box_a, "Box length")->capture_default_str();
  app.add_option("--n-grid", p.n_grid, "Quadrature points (power of two)")
      ->capture_default_str();
  app.add_option("--n-coeffs", p.n_coeffs, "Modes per family")
      ->capture_default_str();
  app.add_option("--steps-per-leg", p.steps_per_leg, "Steps per cycle leg")
      ->capture_default_str();
  app.add_option("--sweeps-per-step", p.sweeps_per_step, "Hold sweeps per step")
      ->capture_default_str();
  app.add_option("--t0", p.t0, "Hold temperature")->capture_default_str();
  app.add_option("--jump-min", p.jump_min, "Jump detection threshold")
      ->capture_default_str();
  app.add_option("--start-side", p.start_side, "left|right")
      ->capture_default_str();
  app.add_flag("--mirror", p.mirror, "Run the exact parity conjugate");
  app.add_flag("--svg", p.svg, "Render an SVG plot of the loop");
  app.add_option("--temps", p.temps, "Preparation ladder length")
      ->capture_default_str();
  app.add_option("--cycles-per-temp", p.cycles,
                 "Preparation sweeps per temperature")
      ->capture_default_str();

  int rc = 0;
  if (parse_args(app, "box-hysteresis", args, rc)) return rc;
  const auto started = Clock::now();

  if (p.start_side != "left" && p.start_side != "right")
    throw ValidationError("--start-side must be 'left' or 'right'");

  EnergyModel model{p.gamma, p.beta, 0.0, {p.box_a, p.n_grid}};
  model.validate();
  CycleSchedule cycle = CycleSchedule::standard(p.v_max, p.steps_per_leg,
                                                p.sweeps_per_step, p.t0);
  const StartSide side =
      p.start_side == "left" ? StartSide::left : StartSide::right;

  AnnealSchedule prep = AnnealSchedule::linear(p.temps, p.cycles, p.seed);
  FourierCoefficients initial =
      prepare_cycle_state(model, cycle.pattern.front(), side, 0.01 * p.v_max,
                          p.n_coeffs, prep, p.seed);
  if (p.mirror) {
    initial = initial.parity_flipped();
    for (double& v : cycle.pattern) v = -v;
  }
  const SweepTrace trace = run_cycle(model, initial, cycle, p.seed, p.mirror);
  if (trace.abort_reason)
    throw ChainError("cycle aborted: " + *trace.abort_reason);

  CsvBuilder csv({"step", "v0", "x_mean", "energy", "acceptance", "leg"});
  std::vector<double> control, response;
  std::vector<int> legs;
  for (std::size_t k = 0; k < trace.points.size(); ++k) {
    const CyclePoint& point = trace.points[k];
    const std::string cells[] = {std::to_string(k),
                                 format_full(point.v0),
                                 format_full(point.x_mean),
                                 format_full(point.energy),
                                 format_full(point.acceptance),
                                 std::to_string(point.leg)};
    csv.row(cells);
    control.push_back(point.v0);
    response.push_back(point.x_mean);
    legs.push_back(point.leg);
  }
  loop_footer(csv, extract_thresholds(trace, p.jump_min));

  std::vector<std::pair<std::string, std::string>> files{
      {"box_hysteresis.csv", csv.text()}};
  if (p.svg)
    files.emplace_back("box_hysteresis.svg",
                       render_svg(control, response, legs, "V0", "x/a"));

  ParamList params;
  params.add("gamma", p.gamma);
  params.add("beta", p.beta);
  params.add("v-max", p.v_max);
  params.add("box-a", p.box_a);
  params.add("n-grid", p.n_grid);
  params.add("n-coeffs", p.n_coeffs);
  params.add("steps-per-leg", p.steps_per_leg);
  params.add("sweeps-per-step", p.sweeps_per_step);
  params.add("t0", p.t0);
  params.add("jump-min", p.jump_min);
  params.add("start-side", p.start_side);
  params.add("mirror", p.mirror);
  params.add("svg", p.svg);
  params.add("temps", p.temps);
  params.add("cycles-per-temp", p.cycles);
  return write_outputs("box-hysteresis", p.out_dir, p.seed, params, files,
                       started);
}

// ---------------------------------------------------------------------------
// beta-scan

struct BetaScanParams {
  double gamma = -1.0;
  std::string betas;
  double v_max = 60.0;
  double box_a = 0.5;
  int n_grid = 512;
  int n_coeffs = 20;
  int steps_per_leg = 50;
  int sweeps_per_step = 200;
  double t0 = 0.05;
  double jump_min = 0.2;
  int temps = 20;
  int cycles = 1500;
  std::uint64_t seed = 5;
  std::string out_dir = ".";
  std::string preset;
};

void apply_preset(BetaScanParams& p, const std::string& preset) {
  if (preset.empty()) return;
  if (preset == "fig4") {
    const Calibration& cal = builtin_calibration();
    p.gamma = cal.gamma;
    p.betas = format_full(cal.strong_beta) + "," +
              format_full(cal.half_strong_beta) + ",0";
    p.v_max = cal.v_max;
    p.box_a = cal.box_a;
    p.n_grid = cal.n_grid;
    p.n_coeffs = cal.n_coeffs;
    p.t0 = cal.t0;
    p.seed = 44;
    return;
  }
  throw ValidationError("unknown preset for beta-scan: " + preset);
}

int cmd_beta_scan(const std::vector<std::string>& args) {
  BetaScanParams p;
  apply_preset(p, find_preset(args));

  CLI::App app{"Hysteresis loops across a list of nonlinear coefficients"};
  add_common(app, p.out_dir, p.preset, p.seed);
  app.add_option("--gamma", p.gamma, "Kinetic coefficient (< 0)")
      ->capture_default_str();
  app.add_option("--betas", p.betas, "Comma-separated beta values (<= 0)")
      ->capture_default_str();
  app.add_option("--v-max", p.v_max, "Cycle amplitude")->capture_default_str();
  app.add_option("--box-a", p.box_a, "Box length")->capture_default_str();
  app.add_option("--n-grid", p.n_grid, "Quadrature points (power of two)")
      ->capture_default_str();
  app.add_option("--n-coeffs", p.n_coeffs, "Modes per family")
      ->capture_default_str();
  app.add_option("--steps-per-leg", p.steps_per_leg, "Steps per cycle leg")
      ->capture_default_str();
  app.add_option("--sweeps-per-step", p.sweeps_per_step, "Hold sweeps per step")
      ->capture_default_str();
  app.add_option("--t0", p.t0, "Hold temperature")->capture_default_str();
  app.add_option("--jump-min", p.jump_min, "Jump detection threshold")
      ->capture_default_str();
  app.add_option("--temps", p.temps, "Preparation ladder length")
      ->capture_default_str();
  app.add_option("--cycles-per-temp", p.cycles,
                 "Preparation sweeps per temperature")
      ->capture_default_str();

  int rc = 0;
  if (parse_args(app, "beta-scan", args, rc)) return rc;
  const auto started = Clock::now();

  const std::vector<double> betas = parse_beta_list(p.betas);
  if (betas.empty())
    throw ValidationError("--betas must list at least one value");

  const BoxSpec box{p.box_a, p.n_grid};
  CycleSchedule cycle = CycleSchedule::standard(p.v_max, p.steps_per_leg,
                                                p.sweeps_per_step, p.t0);
  BetaScanOptions options;
  options.m = p.n_coeffs;
  options.jump_min = p.jump_min;
  options.prep = AnnealSchedule::linear(p.temps, p.cycles);
  const std::vector<LoopSummary> summaries =
      beta_scan(p.gamma, betas, box, cycle, p.seed, options);

  CsvBuilder csv({"beta", "threshold_up", "threshold_down", "loop_area",
                  "jumped"});
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const LoopSummary& s = summaries[i];
    const std::string cells[] = {
        format_full(betas[i]), optional_cell(s.threshold_up),
        optional_cell(s.threshold_down), format_full(s.loop_area),
        bool_name(s.jumped_up && s.jumped_down)};
    csv.row(cells);
  }

  ParamList params;
  params.add("gamma", p.gamma);
  params.add("betas", p.betas);
  params.add("v-max", p.v_max);
  params.add("box-a", p.box_a);
  params.add("n-grid", p.n_grid);
  params.add("n-coeffs", p.n_coeffs);
  params.add("steps-per-leg", p.steps_per_leg);
  params.add("sweeps-per-step", p.sweeps_per_step);
  params.add("t0", p.t0);
  params.add("jump-min", p.jump_min);
  params.add("temps", p.temps);
  params.add("cycles-per-temp", p.cycles);
  return write_outputs("beta-scan", p.out_dir, p.seed, params,
                       {{"beta_scan.csv", csv.text()}}, started);
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateParams {
  double gamma = -1.0;
  double box_a = 0.5;
  int n_grid = 512;
  int n_coeffs = 20;
  std::string betas = "0,-20,-40,-60,-80,-100,-120,-140,-160";
  double v_max = 60.0;
  double area_floor = 10.0;
  int temps = 20;
  int cycles = 1500;
  std::uint64_t seed = 7;
  std::string out_dir = ".";
  std::string preset;
};

int cmd_calibrate(const std::vector<std::string>& args) {
  CalibrateParams p;

  CLI::App app{"Bifurcation scan locating the bistable working point"};
  add_common(app, p.out_dir, p.preset, p.seed);
  app.add_option("--gamma", p.gamma, "Kinetic coefficient (< 0)")
      ->capture_default_str();
  app.add_option("--box-a", p.box_a, "Box length")->capture_default_str();
  app.add_option("--n-grid", p.n_grid, "Quadrature points (power of two)")
      ->capture_default_str();
  app.add_option("--n-coeffs", p.n_coeffs, "Modes per family")
      ->capture_default_str();
  app.add_option("--betas", p.betas, "Scan values, weak to strong")
      ->capture_default_str();
  app.add_option("--v-max", p.v_max, "Probe cycle amplitude")
      ->capture_default_str();
  app.add_option("--area-floor", p.area_floor,
                 "Probe loop area a bistable point must exceed")
      ->capture_default_str();
  app.add_option("--temps", p.temps, "Anneal ladder length")
      ->capture_default_str();
  app.add_option("--cycles-per-temp", p.cycles, "Anneal sweeps per temperature")
      ->capture_default_str();

  int rc = 0;
  if (parse_args(app, "calibrate", args, rc)) return rc;
  const auto started = Clock::now();

  const std::vector<double> betas = parse_beta_list(p.betas);
  if (betas.empty())
    throw ValidationError("--betas must list at least one value");

  const BoxSpec box{p.box_a, p.n_grid};
  AnnealSchedule schedule = AnnealSchedule::linear(p.temps, p.cycles, p.seed);
  BifurcationOptions options;
  options.m = p.n_coeffs;
  options.area_floor = p.area_floor;
  options.probe = CycleSchedule::standard(p.v_max, 25, 100);
  const CalibrationScan scan =
      bifurcation_scan(p.gamma, box, betas, schedule, options);

  CsvBuilder csv({"beta", "order_parameter", "probe_area"});
  for (const BifurcationPoint& point : scan.points) {
    const std::string cells[] = {format_full(point.beta),
                                 format_full(point.order_parameter),
                                 format_full(point.probe_area)};
    csv.row(cells);
  }
  csv.comment("area_floor", format_full(scan.area_floor));
  csv.comment("strong_beta",
              scan.strong_beta ? format_full(*scan.strong_beta) : "not-found");

  std::vector<std::pair<std::string, std::string>> files{
      {"calibration_scan.csv", csv.text()}};
  if (scan.strong_beta) {
    Calibration cal = builtin_calibration();
    cal.gamma = p.gamma;
    cal.box_a = p.box_a;
    cal.n_grid = p.n_grid;
    cal.n_coeffs = p.n_coeffs;
    cal.strong_beta = *scan.strong_beta;
    cal.half_strong_beta = 0.5 * *scan.strong_beta;
    cal.v_max = p.v_max;
    cal.area_floor = p.area_floor;
    files.emplace_back("calibration.cfg", serialize_calibration(cal));
  }

  ParamList params;
  params.add("gamma", p.gamma);
  params.add("box-a", p.box_a);
  params.add("n-grid", p.n_grid);
  params.add("n-coeffs", p.n_coeffs);
  params.add("betas", p.betas);
  params.add("v-max", p.v_max);
  params.add("area-floor", p.area_floor);
  params.add("temps", p.temps);
  params.add("cycles-per-temp", p.cycles);
  return write_outputs("calibrate", p.out_dir, p.seed, params, files, started);
}

void print_usage(std::ostream& out) {
  out << "usage: qhyst <command> [options]\n"
         "\n"
         "commands:\n"
         "  dimer-ground      ground-state asymmetry over a t/U grid\n"
         "  dimer-hysteresis  adiabatic bias sweep of the two-site model\n"
         "  box-anneal        annealed ground state of the box functional\n"
         "  box-hysteresis    full tilt cycle with threshold extraction\n"
         "  beta-scan         loops across several nonlinear coefficients\n"
         "  calibrate         bifurcation scan for the bistable working point\n"
         "\n"
         "run 'qhyst <command> --help' for the command's options.\n";
}

}  // namespace

int run(const std::vector<std::string>& args) {
  try {
    if (args.empty() || args[0] == "--help" || args[0] == "-h") {
      print_usage(args.empty() ? std::cerr : std::cout);
      return args.empty() ? 2 : 0;
    }
    const std::string command = args[0];
    const std::vector<std::string> rest(args.begin() + 1, args.end());
    if (command == "dimer-ground") return cmd_dimer_ground(rest);
    if (command == "dimer-hysteresis") return cmd_dimer_hysteresis(rest);
    if (command == "box-anneal") return cmd_box_anneal(rest);
    if (command == "box-hysteresis") return cmd_box_hysteresis(rest);
    if (command == "beta-scan") return cmd_beta_scan(rest);
    if (command == "calibrate") return cmd_calibrate(rest);
    std::cerr << "error: unknown command '" << command << "'\n";
    print_usage(std::cerr);
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace qhyst::cli
