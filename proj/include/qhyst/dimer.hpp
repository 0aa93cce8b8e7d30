#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qhyst/annealer.hpp"
#include "qhyst/errors.hpp"

namespace qhyst {

enum class Site { donor = 0, acceptor = 1 };

struct DimerParams {
  double eps1 = 0.0;  // donor site energy
  double eps2 = 0.0;  // acceptor site energy
  double t = 0.0;     // hopping magnitude, >= 0 (the solver resolves the phase)
  double u = 0.0;     // self-trapping strength, >= 0

  void validate() const;
};

// Normalized two-component state (z1, z2). Solver outputs are gauge fixed:
// z1 real and >= 0; if z1 vanishes, z2 real and >= 0.
struct DimerAmplitudes {
  std::complex<double> z1{1.0, 0.0};
  std::complex<double> z2{0.0, 0.0};

  static DimerAmplitudes normalized(std::complex<double> c1,
                                    std::complex<double> c2);
  double n1() const { return std::norm(z1); }
  double n2() const { return std::norm(z2); }
};

void require_normalized(const DimerAmplitudes& amps);

// Mean-field energy  eps1*n1 + eps2*n2 + 2t*Re(z1* z2) - U*(n1^2 + n2^2).
double dimer_energy(const DimerParams& params, const DimerAmplitudes& amps);

// S = | |z1|^2 - |z2|^2 |, the symmetry-breaking order parameter.
double asymmetry(const DimerAmplitudes& amps);

// Symmetric case eps1 == eps2: S = sqrt(1 - (t/U)^2) below t/U = 1, else 0.
// t = U = 0 is rejected (every state is then a ground state).
double ground_state_closed_form(const DimerParams& params);

// Simulated-annealing ground state; the schedule must end at T = 0.
DimerAmplitudes ground_state_numeric(const DimerParams& params,
                                     const AnnealSchedule& schedule);

struct DimerSweepPoint {
  double eps2;
  double s;        // signed occupation difference n1 - n2
  double energy;
  int leg;
};

struct DimerSweepTrace {
  std::vector<DimerSweepPoint> points;
  std::uint64_t seed = 0;
};

struct BiasSweepOptions {
  Site start_site = Site::donor;
  int sweeps_per_step = 200;
  // Coarse proposals so a collapsing basin is crossed within one hold phase.
  double sigma0 = 0.3;
  double sigma_floor = 0.05;
  AnnealSchedule prep = AnnealSchedule::linear(20, 2000);
};

// Adiabatic following of the eps2 schedule: prepare a localized state at the
// first value (annealed with a transient 0.01*U pre-bias on the start site),
// then hold at T0 between steps. Mirrored sweeps (schedule negated, start
// site swapped, same seed, eps1 = 0) map to the pointwise negation of s.
DimerSweepTrace bias_sweep(const DimerParams& params,
                           std::span<const double> eps2_schedule, double t0,
                           std::uint64_t seed,
                           const BiasSweepOptions& options = {});

// eps2 values start -> turn -> start, steps_per_leg intervals per leg.
std::vector<double> bias_schedule(double eps2_start, double eps2_turn,
                                  int steps_per_leg);

struct SpinodalThresholds {
  double forward;   // eps2 below which the donor-side minimum is gone
  double backward;  // eps2 above which the acceptor-side minimum is gone
};

// Scans the optimal-phase energy curve E(s) on a dense grid and bisects for
// the eps2 values where the metastable minimum disappears. U = 0 or t >= U
// has no metastable branch; both thresholds collapse to the crossing eps2 =
// eps1.
SpinodalThresholds spinodal_thresholds(const DimerParams& params);

// Optimal-phase energy on the occupation-difference axis, Re(z1* z2) =
// -sqrt(n1 n2). Shared by the spinodal scan; tests carry their own copy.
double dimer_curve_energy(const DimerParams& params, double eps2, double s);

// Annealer objective over [first_re, first_im, second_re, second_im], where
// "first" is a chosen storage site. Energies are measured relative to the
// first site's level, so two sweeps related by site exchange (and a constant
// shift of both levels) produce bit-identical chains from the same seed.
class DimerObjective final : public Objective {
 public:
  DimerObjective(const DimerParams& params, Site first);

  std::size_t dimension() const override { return 4; }
  double evaluate(std::span<const double> params) override;
  double propose(std::size_t index, double delta) override;
  void accept() override;
  void reject() override;

  void set_eps2(double eps2);
  double eps2() const { return eps2_; }
  // Add to the relative energy to recover the physical value.
  double energy_offset() const;
  double signed_occupation(std::span<const double> params) const;
  DimerAmplitudes amplitudes(std::span<const double> params) const;

 private:
  double relative_energy(const std::array<double, 4>& p) const;

  DimerParams params_;
  Site first_;
  double eps2_;
  double bias_ = 0.0;  // eps_second - eps_first
  std::array<double, 4> p_{};
  std::size_t pending_index_ = 0;
  double pending_delta_ = 0.0;
  bool pending_ = false;
};

}  // namespace qhyst
