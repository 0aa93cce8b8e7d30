#include "qhyst/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qhyst {

namespace {

constexpr double kDegenerateNorm = 1e-300;
constexpr double kBarrierEnergy = 1e300;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Trapezoid weight in units of the spacing.
double node_weight(std::size_t i, std::size_t n) {
  return (i == 0 || i + 1 == n) ? 0.5 : 1.0;
}

// Quadrature sums accumulate mirror pairs (i, n-1-i) together; IEEE addition
// commutes, so a parity-reversed field produces the bit-exact same (or
// exactly negated) sum.
double quartic_sum(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  double acc = 0.0;
  for (std::size_t i = 0; 2 * i < n; ++i) {
    const std::size_t j = n - 1 - i;
    const double w = node_weight(i, n);
    const double fi2 = f[i] * f[i];
    const double fj2 = f[j] * f[j];
    acc += w * (fi2 * fi2) + w * (fj2 * fj2);
  }
  return acc * h;
}

double weighted_x_sum(std::span<const double> f, std::span<const double> x,
                      double h) {
  const std::size_t n = f.size();
  double acc = 0.0;
  for (std::size_t i = 0; 2 * i < n; ++i) {
    const std::size_t j = n - 1 - i;
    const double w = node_weight(i, n);
    acc += w * x[i] * (f[i] * f[i]) + w * x[j] * (f[j] * f[j]);
  }
  return acc * h;
}

double square_sum(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  double acc = 0.0;
  for (std::size_t i = 0; 2 * i < n; ++i) {
    const std::size_t j = n - 1 - i;
    const double w = node_weight(i, n);
    acc += w * (f[i] * f[i]) + w * (f[j] * f[j]);
  }
  return acc * h;
}

std::vector<double> build_raw(const BoxBasis& basis,
                              std::span<const double> coeffs) {
  std::vector<double> raw(basis.box().n_grid, 0.0);
  for (std::size_t idx = 0; idx < coeffs.size(); ++idx) {
    const double c = coeffs[idx];
    if (c == 0.0) continue;
    const std::vector<double>& row = basis.row(idx);
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] += c * row[i];
  }
  return raw;
}

}  // namespace

void BoxSpec::validate() const {
  if (!(a > 0.0) || !std::isfinite(a))
    throw ValidationError("box: length a must be finite and > 0");
  if (n_grid < 64 || !power_of_two(n_grid))
    throw ValidationError("box: n_grid must be a power of two >= 64");
}

std::vector<double> BoxSpec::nodes() const {
  validate();
  const int n = n_grid;
  std::vector<double> x(n);
  for (int i = 0; 2 * i < n; ++i) {
    // r is an exact integer ratio with r(0) = -1/2, so the endpoints land
    // exactly on +-a/2 and x[n-1-i] is the exact negation of x[i].
    const double r = static_cast<double>(2 * i - (n - 1)) /
                     static_cast<double>(2 * (n - 1));
    x[i] = a * r;
    x[n - 1 - i] = -x[i];
  }
  return x;
}

void EnergyModel::validate() const {
  box.validate();
  if (!(gamma < 0.0) || !std::isfinite(gamma))
    throw ValidationError("model: gamma must be finite and < 0");
  if (!(beta <= 0.0) || !std::isfinite(beta))
    throw ValidationError("model: beta must be finite and <= 0");
  if (!std::isfinite(v0))
    throw ValidationError("model: v0 must be finite");
}

void FourierCoefficients::validate() const {
  if (a_n.empty() || a_n.size() != b_n.size())
    throw ValidationError("coefficients: a_n and b_n must be nonempty and equal length");
  bool any = false;
  for (double v : a_n) {
    if (!std::isfinite(v)) throw ValidationError("coefficients: non-finite value");
    any = any || v != 0.0;
  }
  for (double v : b_n) {
    if (!std::isfinite(v)) throw ValidationError("coefficients: non-finite value");
    any = any || v != 0.0;
  }
  if (!any) throw ValidationError("coefficients: all zero");
}

double FourierCoefficients::norm_accum() const {
  double acc = 0.0;
  for (double v : a_n) acc += v * v;
  for (double v : b_n) acc += v * v;
  return acc;
}

std::vector<double> FourierCoefficients::flat() const {
  std::vector<double> out;
  out.reserve(a_n.size() + b_n.size());
  out.insert(out.end(), a_n.begin(), a_n.end());
  out.insert(out.end(), b_n.begin(), b_n.end());
  return out;
}

FourierCoefficients FourierCoefficients::from_flat(
    std::span<const double> flat) {
  if (flat.empty() || flat.size() % 2 != 0)
    throw ValidationError("coefficients: flat layout must have even length");
  const std::size_t m = flat.size() / 2;
  FourierCoefficients c;
  c.a_n.assign(flat.begin(), flat.begin() + m);
  c.b_n.assign(flat.begin() + m, flat.end());
  c.validate();
  return c;
}

FourierCoefficients FourierCoefficients::single_cosine(int m, int n) {
  if (m < 1 || n < 0 || n >= m)
    throw ValidationError("coefficients: mode index out of range");
  FourierCoefficients c;
  c.a_n.assign(m, 0.0);
  c.b_n.assign(m, 0.0);
  c.a_n[n] = 1.0;
  return c;
}

FourierCoefficients FourierCoefficients::parity_flipped() const {
  FourierCoefficients c = *this;
  for (double& v : c.b_n) v = -v;
  return c;
}

std::vector<double> random_coefficient_vector(int m, Rng& rng) {
  if (m < 1) throw ValidationError("coefficients: need at least one mode");
  std::vector<double> p(2 * static_cast<std::size_t>(m));
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& v : p) {
      v = rng.gaussian();
      norm += v * v;
    }
  } while (norm < 1e-12);
  const double scale = 1.0 / std::sqrt(norm);
  for (double& v : p) v *= scale;
  return p;
}

double cosine_wavenumber(const BoxSpec& box, int n) {
  return 2.0 * std::numbers::pi / box.a * (n + 0.5);
}

double sine_wavenumber(const BoxSpec& box, int n) {
  return 2.0 * std::numbers::pi / box.a * (n + 1.0);
}

double evaluate(const FourierCoefficients& coeffs, const BoxSpec& box,
                double x) {
  coeffs.validate();
  box.validate();
  const double half = 0.5 * box.a;
  if (x < -half - 1e-12 * box.a || x > half + 1e-12 * box.a)
    throw ValidationError("evaluate: x outside the box");
  double series = 0.0;
  for (int n = 0; n < coeffs.modes(); ++n)
    series += coeffs.a_n[n] * std::cos(cosine_wavenumber(box, n) * x);
  for (int n = 0; n < coeffs.modes(); ++n)
    series += coeffs.b_n[n] * std::sin(sine_wavenumber(box, n) * x);
  const double pref = std::sqrt((2.0 / box.a) / coeffs.norm_accum());
  return pref * series;
}

BoxBasis::BoxBasis(const BoxSpec& box, int m) : box_(box), m_(m) {
  box_.validate();
  if (m < 1) throw ValidationError("basis: need at least one mode per family");
  nodes_ = box_.nodes();
  const std::size_t dim = dimension();
  rows_.resize(dim);
  k_.resize(dim);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    rows_[idx] = sampled_basis_row(box_, m_, idx);
    k_[idx] = idx < static_cast<std::size_t>(m_)
                  ? cosine_wavenumber(box_, static_cast<int>(idx))
                  : sine_wavenumber(box_, static_cast<int>(idx) - m_);
  }
}

const std::vector<double>& BoxBasis::row(std::size_t index) const {
  return rows_.at(index);
}

std::vector<double> sampled_basis_row(const BoxSpec& box, int m,
                                      std::size_t index) {
  if (index >= 2 * static_cast<std::size_t>(m))
    throw ValidationError("basis: row index out of range");
  const std::vector<double> x = box.nodes();
  const std::size_t n = x.size();
  std::vector<double> row(n);
  const bool is_cos = index < static_cast<std::size_t>(m);
  const double k = is_cos ? cosine_wavenumber(box, static_cast<int>(index))
                          : sine_wavenumber(box, static_cast<int>(index) - m);
  for (std::size_t i = 0; 2 * i < n; ++i) {
    if (is_cos) {
      row[i] = std::cos(k * x[i]);
      row[n - 1 - i] = row[i];
    } else {
      row[i] = std::sin(k * x[i]);
      row[n - 1 - i] = -row[i];
    }
  }
  return row;
}

GridField::GridField(const FourierCoefficients& coeffs, const BoxSpec& box)
    : box_(box), m_(coeffs.modes()) {
  coeffs.validate();
  box_.validate();
  BoxBasis basis(box_, m_);
  raw_ = build_raw(basis, coeffs.flat());
  norm_accum_ = coeffs.norm_accum();
}

GridField::GridField(BoxSpec box, int m, std::vector<double> raw,
                     double norm_accum)
    : box_(box), m_(m), raw_(std::move(raw)), norm_accum_(norm_accum) {}

double GridField::value(std::size_t i) const {
  const double pref = std::sqrt((2.0 / box_.a) / norm_accum_);
  return pref * raw_.at(i);
}

std::vector<double> GridField::values() const {
  std::vector<double> out(raw_.size());
  const double pref = std::sqrt((2.0 / box_.a) / norm_accum_);
  for (std::size_t i = 0; i < raw_.size(); ++i) out[i] = pref * raw_[i];
  return out;
}

GridField to_grid(const FourierCoefficients& coeffs, const BoxSpec& box) {
  return GridField(coeffs, box);
}

double expectation_x(const GridField& field, const BoxSpec& box) {
  box.validate();
  if (static_cast<int>(field.size()) != box.n_grid)
    throw ValidationError("expectation_x: field and box grids differ");
  const std::vector<double> x = box.nodes();
  const double pref2 = (2.0 / box.a) / field.norm_accum();
  const double s = weighted_x_sum(field.raw(), x, box.spacing());
  return pref2 * s / box.a;
}

double energy(const FourierCoefficients& coeffs, const EnergyModel& model) {
  coeffs.validate();
  model.validate();
  BoxBasis basis(model.box, coeffs.modes());
  const std::vector<double> flat = coeffs.flat();
  const std::vector<double> raw = build_raw(basis, flat);

  double norm = 0.0, kin = 0.0;
  for (std::size_t idx = 0; idx < flat.size(); ++idx) {
    const double c2 = flat[idx] * flat[idx];
    norm += c2;
    kin += c2 * (basis.wavenumber(idx) * basis.wavenumber(idx));
  }
  if (!(norm > kDegenerateNorm))
    throw ValidationError("energy: coefficients are numerically zero");

  const double h = model.box.spacing();
  const double quart = quartic_sum(raw, h);
  const double potx = weighted_x_sum(raw, basis.nodes(), h);

  const double pref2 = (2.0 / model.box.a) / norm;
  const double kinetic = -model.gamma * (kin / norm);
  const double quartic = 0.5 * model.beta * (pref2 * pref2) * quart;
  const double cpot = -2.0 * model.v0 / model.box.a;
  const double potential = cpot * (pref2 * potx);
  return kinetic + quartic + potential;
}

std::pair<GridField, FourierCoefficients> apply_coefficient_delta(
    const GridField& field, const FourierCoefficients& coeffs,
    std::size_t index, double delta) {
  coeffs.validate();
  const std::size_t m = coeffs.a_n.size();
  if (index >= 2 * m)
    throw ValidationError("apply_coefficient_delta: index out of range");
  if (field.modes() != coeffs.modes() ||
      static_cast<int>(field.size()) != field.box().n_grid)
    throw ValidationError("apply_coefficient_delta: field does not match coefficients");

  if (delta == 0.0) return {field, coeffs};

  FourierCoefficients next = coeffs;
  double& slot = index < m ? next.a_n[index] : next.b_n[index - m];
  const double before = slot;
  slot += delta;

  const double norm_next = field.norm_accum() + delta * (2.0 * before + delta);
  bool any = false;
  for (double v : next.a_n) any = any || v != 0.0;
  for (double v : next.b_n) any = any || v != 0.0;
  if (!any || !(norm_next > kDegenerateNorm))
    throw ValidationError("apply_coefficient_delta: update would zero the state");

  const std::vector<double> row = sampled_basis_row(field.box(), coeffs.modes(), index);
  std::vector<double> raw = field.raw();
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] += delta * row[i];

  return {GridField(field.box(), field.modes(), std::move(raw), norm_next),
          std::move(next)};
}

// ---------------------------------------------------------------------------
// BoxObjective

BoxObjective::BoxObjective(const EnergyModel& model, int m)
    : model_(model), basis_(model.box, m) {
  model_.validate();
}

double BoxObjective::combined_energy(double norm, double kin, double quart,
                                     double potx) const {
  const double pref2 = (2.0 / model_.box.a) / norm;
  const double kinetic = -model_.gamma * (kin / norm);
  const double quartic = 0.5 * model_.beta * (pref2 * pref2) * quart;
  const double cpot = -2.0 * model_.v0 / model_.box.a;
  const double potential = cpot * (pref2 * potx);
  return kinetic + quartic + potential;
}

double BoxObjective::evaluate(std::span<const double> params) {
  if (params.size() != dimension())
    throw ValidationError("box objective: parameter size mismatch");
  coeffs_.assign(params.begin(), params.end());
  pending_ = false;

  norm_ = 0.0;
  kin_ = 0.0;
  for (std::size_t idx = 0; idx < coeffs_.size(); ++idx) {
    const double c2 = coeffs_[idx] * coeffs_[idx];
    norm_ += c2;
    kin_ += c2 * (basis_.wavenumber(idx) * basis_.wavenumber(idx));
  }
  if (!(norm_ > kDegenerateNorm))
    throw ValidationError("box objective: coefficients are numerically zero");

  raw_ = build_raw(basis_, coeffs_);
  const double h = model_.box.spacing();
  quart_ = quartic_sum(raw_, h);
  potx_ = weighted_x_sum(raw_, basis_.nodes(), h);
  return combined_energy(norm_, kin_, quart_, potx_);
}

double BoxObjective::propose(std::size_t index, double delta) {
  const double c = coeffs_[index];
  const double dn = delta * (2.0 * c + delta);
  const double norm_next = norm_ + dn;
  if (!(norm_next > kDegenerateNorm)) {
    pending_ = false;
    return kBarrierEnergy;  // reject: state would become numerically zero
  }

  const double k = basis_.wavenumber(index);
  trial_norm_ = norm_next;
  trial_kin_ = kin_ + dn * (k * k);

  const std::vector<double>& row = basis_.row(index);
  const std::vector<double>& x = basis_.nodes();
  const std::size_t n = raw_.size();
  trial_raw_.resize(n);

  // One fused pass over mirror pairs: update the field and rebuild both
  // grid sums.
  double quart = 0.0, potx = 0.0;
  for (std::size_t i = 0; 2 * i < n; ++i) {
    const std::size_t j = n - 1 - i;
    const double w = node_weight(i, n);
    const double fi = raw_[i] + delta * row[i];
    const double fj = raw_[j] + delta * row[j];
    trial_raw_[i] = fi;
    trial_raw_[j] = fj;
    const double fi2 = fi * fi;
    const double fj2 = fj * fj;
    quart += w * (fi2 * fi2) + w * (fj2 * fj2);
    potx += w * x[i] * fi2 + w * x[j] * fj2;
  }
  const double h = model_.box.spacing();
  trial_quart_ = quart * h;
  trial_potx_ = potx * h;

  trial_index_ = index;
  trial_delta_ = delta;
  pending_ = true;
  return combined_energy(trial_norm_, trial_kin_, trial_quart_, trial_potx_);
}

void BoxObjective::accept() {
  if (!pending_) return;
  raw_.swap(trial_raw_);
  norm_ = trial_norm_;
  kin_ = trial_kin_;
  quart_ = trial_quart_;
  potx_ = trial_potx_;
  coeffs_[trial_index_] += trial_delta_;
  pending_ = false;
}

void BoxObjective::reject() { pending_ = false; }

void BoxObjective::set_tilt(double v0) {
  if (!std::isfinite(v0)) throw ValidationError("box objective: v0 must be finite");
  model_.v0 = v0;
}

double BoxObjective::expectation_x_over_a() const {
  const double pref2 = (2.0 / model_.box.a) / norm_;
  return pref2 * potx_ / model_.box.a;
}

GridField BoxObjective::field() const {
  return GridField(model_.box, basis_.modes(), raw_, norm_);
}

FourierCoefficients BoxObjective::coefficients() const {
  return FourierCoefficients::from_flat(coeffs_);
}

}  // namespace qhyst
