#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qhyst/annealer.hpp"
#include "qhyst/errors.hpp"

namespace qhyst {

// Hard-wall box [-a/2, +a/2] with a uniform quadrature grid, endpoints
// included. Nodes are generated so x[n-1-i] is the exact negation of x[i];
// together with the mirror-paired quadrature sums below this makes the
// parity covariance of the energy exact in floating point, not just up to
// rounding.
struct BoxSpec {
  double a = 0.5;     // box length, > 0
  int n_grid = 512;   // >= 64, power of two

  void validate() const;
  std::vector<double> nodes() const;
  double spacing() const { return a / (n_grid - 1); }
};

struct EnergyModel {
  double gamma = -1.0;  // kinetic coefficient, < 0
  double beta = 0.0;    // self-trapping coefficient, <= 0
  double v0 = 0.0;      // tilt amplitude; positive pulls density toward +a/2
  BoxSpec box;

  void validate() const;
};

// Sine/cosine expansion vanishing at +-a/2 by construction: cosine
// wavenumbers (2pi/a)(n + 1/2), sine wavenumbers (2pi/a)(n + 1). The
// represented state carries the self-normalizing prefactor
// sqrt((2/a) / sum(a_n^2 + b_n^2)), so coefficient vectors are scale-free.
struct FourierCoefficients {
  std::vector<double> a_n;  // cosine coefficients
  std::vector<double> b_n;  // sine coefficients, same length

  int modes() const { return static_cast<int>(a_n.size()); }
  void validate() const;  // equal sizes, finite, not all zero
  double norm_accum() const;

  // Flat layout [a_0..a_{M-1}, b_0..b_{M-1}] used by the annealer.
  std::vector<double> flat() const;
  static FourierCoefficients from_flat(std::span<const double> flat);
  static FourierCoefficients single_cosine(int m, int n);
  FourierCoefficients parity_flipped() const;  // b_n -> -b_n, the mirror state
};

double cosine_wavenumber(const BoxSpec& box, int n);
double sine_wavenumber(const BoxSpec& box, int n);

// Unit-norm Gaussian coefficient vector in the flat layout; the usual random
// start of an anneal.
std::vector<double> random_coefficient_vector(int m, Rng& rng);

// Normalized series value at x; x must lie inside the box.
double evaluate(const FourierCoefficients& coeffs, const BoxSpec& box,
                double x);

// Basis rows sampled on the grid, filled by mirror symmetry so that
// cos_row[n-1-i] == cos_row[i] and sin_row[n-1-i] == -sin_row[i] bitwise.
// Flat index: [0, m) cosine block, [m, 2m) sine block.
class BoxBasis {
 public:
  BoxBasis(const BoxSpec& box, int m);

  const BoxSpec& box() const { return box_; }
  int modes() const { return m_; }
  std::size_t dimension() const { return 2 * static_cast<std::size_t>(m_); }
  const std::vector<double>& row(std::size_t index) const;
  double wavenumber(std::size_t index) const { return k_[index]; }
  const std::vector<double>& nodes() const { return nodes_; }

 private:
  BoxSpec box_;
  int m_;
  std::vector<double> nodes_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> k_;
};

// One basis row sampled on the grid (used by the incremental update when no
// precomputed basis is at hand). Same mirror-fill as BoxBasis.
std::vector<double> sampled_basis_row(const BoxSpec& box, int m,
                                      std::size_t index);

// Evaluation cache: unnormalized series samples plus the coefficient norm
// accumulator. Values are exposed normalized.
class GridField {
 public:
  GridField(const FourierCoefficients& coeffs, const BoxSpec& box);
  GridField(BoxSpec box, int m, std::vector<double> raw, double norm_accum);

  const BoxSpec& box() const { return box_; }
  int modes() const { return m_; }
  std::size_t size() const { return raw_.size(); }
  double norm_accum() const { return norm_accum_; }
  const std::vector<double>& raw() const { return raw_; }
  double value(std::size_t i) const;
  std::vector<double> values() const;

 private:
  BoxSpec box_;
  int m_;
  std::vector<double> raw_;
  double norm_accum_;
};

GridField to_grid(const FourierCoefficients& coeffs, const BoxSpec& box);

// <x>/a by trapezoidal quadrature; in [-1/2, +1/2].
double expectation_x(const GridField& field, const BoxSpec& box);

// E[psi] = |gamma| int psi'^2 + (beta/2) int psi^4 + int V psi^2 with
// V(x) = -2 v0 x / a (the constant part of the tilt only shifts E). The
// kinetic term is the closed form sum(c^2 k^2)/sum(c^2); the quartic and
// potential terms use grid quadrature. Invariant under coefficient rescaling.
double energy(const FourierCoefficients& coeffs, const EnergyModel& model);

// Single-coefficient update of a cached field: O(n_grid), independent of the
// number of modes. A delta that would zero every coefficient is rejected.
std::pair<GridField, FourierCoefficients> apply_coefficient_delta(
    const GridField& field, const FourierCoefficients& coeffs,
    std::size_t index, double delta);

// Annealer objective for the box functional. Keeps the unnormalized field
// and the quadrature accumulators incrementally up to date, so one proposal
// costs O(n_grid). The tilt amplitude may be changed between hold phases;
// callers re-evaluate afterwards.
class BoxObjective final : public Objective {
 public:
  BoxObjective(const EnergyModel& model, int m);

  std::size_t dimension() const override { return basis_.dimension(); }
  double evaluate(std::span<const double> params) override;
  double propose(std::size_t index, double delta) override;
  void accept() override;
  void reject() override;

  void set_tilt(double v0);
  const EnergyModel& model() const { return model_; }
  double expectation_x_over_a() const;
  GridField field() const;
  FourierCoefficients coefficients() const;

 private:
  double combined_energy(double norm, double kin, double quart,
                         double potx) const;

  EnergyModel model_;
  BoxBasis basis_;
  std::vector<double> coeffs_;
  std::vector<double> raw_;
  double norm_ = 0.0, kin_ = 0.0, quart_ = 0.0, potx_ = 0.0;

  std::vector<double> trial_raw_;
  double trial_norm_ = 0.0, trial_kin_ = 0.0, trial_quart_ = 0.0,
         trial_potx_ = 0.0;
  std::size_t trial_index_ = 0;
  double trial_delta_ = 0.0;
  bool pending_ = false;
};

}  // namespace qhyst
