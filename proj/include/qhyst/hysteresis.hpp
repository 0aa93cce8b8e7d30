#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qhyst/annealer.hpp"
#include "qhyst/wavefunction.hpp"

namespace qhyst {

// Tilt-amplitude program for one experiment: pattern holds the leg endpoints
// (the default cycle is 0 -> +v_max -> -v_max -> +v_max), each leg split into
// steps_per_leg equal steps with exact endpoint landing.
struct CycleSchedule {
  double v_max = 1.0;
  int steps_per_leg = 50;
  std::vector<double> pattern;  // endpoint values, >= 2 entries
  int sweeps_per_step = 200;
  double t0 = 0.05;

  static CycleSchedule standard(double v_max, int steps_per_leg = 50,
                                int sweeps_per_step = 200, double t0 = 0.05);
  void validate() const;
  std::vector<double> control_values() const;
  std::vector<int> leg_labels() const;
};

struct CyclePoint {
  double v0;
  double x_mean;      // <x>/a
  double energy;
  double acceptance;  // Metropolis acceptance over the step's hold phase
  int leg;
};

struct SweepTrace {
  std::vector<CyclePoint> points;
  std::uint64_t seed = 0;
  EnergyModel model;                       // snapshot, tilt = first step value
  std::optional<std::string> abort_reason; // set if the cycle stopped early
};

enum class StartSide { left, right };

// Annealed ground state at the cycle's first tilt value, localized on the
// requested side by a transient bias of bias_fraction * v_max that is removed
// (followed by a short strict-descent polish) before the cycle begins.
FourierCoefficients prepare_cycle_state(const EnergyModel& model, double v_first,
                                        StartSide side, double bias_magnitude,
                                        int m, const AnnealSchedule& schedule,
                                        std::uint64_t seed);

// Adiabatic following of the tilt program: at each step the chain holds at T0
// for sweeps_per_step sweeps, then (v0, <x>/a, energy, acceptance) is
// recorded. mirrored=true negates the proposal deltas of the sine block; a
// run with parity-flipped initial state, negated pattern, the same seed and
// mirrored proposals produces the bit-exact pointwise negation of x_mean.
SweepTrace run_cycle(const EnergyModel& model,
                     const FourierCoefficients& initial,
                     const CycleSchedule& cycle, std::uint64_t seed,
                     bool mirrored = false);

struct LoopSummary {
  std::optional<double> threshold_up;    // jump on a rising leg
  std::optional<double> threshold_down;  // jump on a falling leg
  double loop_area = 0.0;                // |closed-loop integral of x dV|
  bool jumped_up = false;
  bool jumped_down = false;
  bool ambiguous = false;  // more than one jump inside a single leg
};

// A jump is a step-to-step response change larger than jump_min; the
// threshold is the midpoint of the bracketing control values. The loop area
// integrates over the closed portion of the trace (from the first visit to
// the final control value onward) by trapezoid.
LoopSummary extract_thresholds(std::span<const double> control,
                               std::span<const double> response,
                               std::span<const int> legs, double jump_min);
LoopSummary extract_thresholds(const SweepTrace& trace, double jump_min = 0.2);

struct BetaScanOptions {
  int m = 20;
  StartSide start = StartSide::left;
  double jump_min = 0.2;
  AnnealSchedule prep = AnnealSchedule::linear(20, 1500);
};

// One loop summary per beta, same cycle and matched seeds; scans run
// concurrently and merge in input order.
std::vector<LoopSummary> beta_scan(double gamma, std::span<const double> betas,
                                   const BoxSpec& box,
                                   const CycleSchedule& cycle,
                                   std::uint64_t seed,
                                   const BetaScanOptions& options = {});

struct BifurcationPoint {
  double beta;
  double order_parameter;  // |<x>|/a of the tilt-free annealed state
  double probe_area;       // loop area of a short probe cycle
};

struct CalibrationScan {
  std::vector<BifurcationPoint> points;
  std::optional<double> strong_beta;  // weakest beta whose probe area clears
                                      // the floor; empty if none does
  double area_floor = 0.0;
};

struct BifurcationOptions {
  int m = 20;
  int order_seeds = 3;
  double area_floor = 1.0;
  CycleSchedule probe = CycleSchedule::standard(1.0, 25, 100);
};

// Walks beta from weak to strong nonlinearity, annealing at zero tilt and
// probing each point with a short cycle. beta_range must be non-increasing
// (toward stronger self-trapping).
CalibrationScan bifurcation_scan(double gamma, const BoxSpec& box,
                                 std::span<const double> beta_range,
                                 const AnnealSchedule& schedule,
                                 const BifurcationOptions& options);

}  // namespace qhyst
