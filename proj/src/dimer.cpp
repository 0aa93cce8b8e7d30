#include "qhyst/dimer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qhyst {

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kDegenerateNorm = 1e-300;
constexpr double kBarrierEnergy = 1e300;  // finite, so a degenerate proposal is
                                          // rejected instead of raising

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

void DimerParams::validate() const {
  if (!std::isfinite(eps1) || !std::isfinite(eps2))
    throw ValidationError("dimer: site energies must be finite");
  if (!(t >= 0.0) || !std::isfinite(t))
    throw ValidationError("dimer: hopping t must be finite and >= 0");
  if (!(u >= 0.0) || !std::isfinite(u))
    throw ValidationError("dimer: self-trapping U must be finite and >= 0");
}

DimerAmplitudes DimerAmplitudes::normalized(std::complex<double> c1,
                                            std::complex<double> c2) {
  const double n = std::sqrt(std::norm(c1) + std::norm(c2));
  if (!(n > 0.0) || !std::isfinite(n))
    throw ValidationError("dimer amplitudes: state must be nonzero and finite");
  c1 /= n;
  c2 /= n;
  const double m1 = std::abs(c1);
  if (m1 > 1e-15) {
    c2 *= std::conj(c1) / m1;  // remove the global phase
    c1 = m1;
  } else {
    c1 = 0.0;
    c2 = std::abs(c2);
  }
  return {c1, c2};
}

void require_normalized(const DimerAmplitudes& amps) {
  const double n = std::norm(amps.z1) + std::norm(amps.z2);
  if (std::abs(n - 1.0) > kNormTolerance)
    throw ValidationError("dimer amplitudes: |z1|^2 + |z2|^2 must equal 1");
}

double dimer_energy(const DimerParams& params, const DimerAmplitudes& amps) {
  params.validate();
  require_normalized(amps);
  const double n1 = amps.n1();
  const double n2 = amps.n2();
  const double cross = amps.z1.real() * amps.z2.real() +
                       amps.z1.imag() * amps.z2.imag();  // Re(z1* z2)
  return params.eps1 * n1 + params.eps2 * n2 + 2.0 * params.t * cross -
         params.u * (n1 * n1 + n2 * n2);
}

double asymmetry(const DimerAmplitudes& amps) {
  require_normalized(amps);
  return std::abs(amps.n1() - amps.n2());
}

double ground_state_closed_form(const DimerParams& params) {
  params.validate();
  if (params.eps1 != params.eps2)
    throw ValidationError("closed form requires eps1 == eps2");
  if (params.u == 0.0 && params.t == 0.0)
    throw ValidationError(
        "degenerate dimer: t = U = 0 makes every state a ground state");
  if (params.u == 0.0) return 0.0;  // linear limit
  const double r = params.t / params.u;
  if (r >= 1.0) return 0.0;
  return std::sqrt((1.0 - r) * (1.0 + r));
}

// ---------------------------------------------------------------------------
// Annealer objective

DimerObjective::DimerObjective(const DimerParams& params, Site first)
    : params_(params), first_(first), eps2_(params.eps2) {
  params_.validate();
  set_eps2(params.eps2);
}

void DimerObjective::set_eps2(double eps2) {
  if (!std::isfinite(eps2)) throw ValidationError("dimer: eps2 must be finite");
  eps2_ = eps2;
  bias_ = (first_ == Site::donor) ? eps2 - params_.eps1 : params_.eps1 - eps2;
}

double DimerObjective::energy_offset() const {
  return (first_ == Site::donor) ? params_.eps1 : eps2_;
}

double DimerObjective::relative_energy(const std::array<double, 4>& p) const {
  const double nf_raw = p[0] * p[0] + p[1] * p[1];
  const double ns_raw = p[2] * p[2] + p[3] * p[3];
  const double norm = nf_raw + ns_raw;
  if (!(norm > kDegenerateNorm)) return kBarrierEnergy;
  const double nf = nf_raw / norm;
  const double ns = ns_raw / norm;
  const double cross = (p[0] * p[2] + p[1] * p[3]) / norm;
  return bias_ * ns + 2.0 * params_.t * cross - params_.u * (nf * nf + ns * ns);
}

double DimerObjective::evaluate(std::span<const double> params) {
  if (params.size() != 4)
    throw ValidationError("dimer objective: expected 4 parameters");
  std::copy(params.begin(), params.end(), p_.begin());
  pending_ = false;
  const double e = relative_energy(p_);
  if (e >= kBarrierEnergy)
    throw ValidationError("dimer objective: state is numerically zero");
  return e;
}

double DimerObjective::propose(std::size_t index, double delta) {
  std::array<double, 4> trial = p_;
  trial[index] += delta;
  pending_index_ = index;
  pending_delta_ = delta;
  pending_ = true;
  return relative_energy(trial);
}

void DimerObjective::accept() {
  if (pending_) p_[pending_index_] += pending_delta_;
  pending_ = false;
}

void DimerObjective::reject() { pending_ = false; }

double DimerObjective::signed_occupation(std::span<const double> p) const {
  const double nf_raw = p[0] * p[0] + p[1] * p[1];
  const double ns_raw = p[2] * p[2] + p[3] * p[3];
  const double s_storage = (nf_raw - ns_raw) / (nf_raw + ns_raw);
  return (first_ == Site::donor) ? s_storage : -s_storage;
}

DimerAmplitudes DimerObjective::amplitudes(std::span<const double> p) const {
  const std::complex<double> f{p[0], p[1]};
  const std::complex<double> s{p[2], p[3]};
  return (first_ == Site::donor) ? DimerAmplitudes::normalized(f, s)
                                 : DimerAmplitudes::normalized(s, f);
}

// ---------------------------------------------------------------------------
// Solvers and sweep driver

namespace {

std::vector<double> random_state4(Rng& rng) {
  std::vector<double> p(4);
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

void rescale_to_unit(std::vector<double>& p) {
  double norm = 0.0;
  for (double v : p) norm += v * v;
  const double scale = 1.0 / std::sqrt(norm);
  for (double& v : p) v *= scale;
}

}  // namespace

DimerAmplitudes ground_state_numeric(const DimerParams& params,
                                     const AnnealSchedule& schedule) {
  params.validate();
  schedule.validate();
  if (schedule.temps.back() != 0.0)
    throw ValidationError("ground state: schedule must end at T = 0");

  DimerObjective objective(params, Site::donor);
  Rng init_rng = Rng::stream(schedule.seed, 0xD1);
  ChainState chain = make_chain(objective, random_state4(init_rng),
                                mix_seed(schedule.seed, 0xD2));
  anneal(chain, objective, schedule);
  return objective.amplitudes(chain.parameters);
}

std::vector<double> bias_schedule(double eps2_start, double eps2_turn,
                                  int steps_per_leg) {
  if (steps_per_leg < 2)
    throw ValidationError("bias schedule: steps_per_leg must be >= 2");
  std::vector<double> values;
  values.reserve(2 * steps_per_leg + 1);
  values.push_back(eps2_start);
  auto leg = [&](double from, double to) {
    for (int i = 1; i <= steps_per_leg; ++i) {
      values.push_back(i == steps_per_leg
                           ? to
                           : from + (to - from) * static_cast<double>(i) /
                                        static_cast<double>(steps_per_leg));
    }
  };
  leg(eps2_start, eps2_turn);
  leg(eps2_turn, eps2_start);
  return values;
}

DimerSweepTrace bias_sweep(const DimerParams& params,
                           std::span<const double> eps2_schedule, double t0,
                           std::uint64_t seed,
                           const BiasSweepOptions& options) {
  params.validate();
  if (!(t0 > 0.0))
    throw ValidationError("bias sweep: T0 must be positive");
  if (eps2_schedule.empty())
    throw ValidationError("bias sweep: empty eps2 schedule");

  // Preparation: anneal at the first eps2 with a small symmetry-breaking
  // pre-bias on the start site, removed before the sweep begins.
  DimerParams prep = params;
  prep.eps2 = eps2_schedule.front();
  const double pre_bias = 0.01 * params.u;
  if (options.start_site == Site::donor)
    prep.eps1 -= pre_bias;
  else
    prep.eps2 -= pre_bias;

  DimerObjective prep_objective(prep, options.start_site);
  std::vector<double> start(4, 0.0);
  start[0] = 1.0;  // fully on the start site
  ChainState chain =
      make_chain(prep_objective, std::move(start), mix_seed(seed, 0xB1));
  AnnealSchedule prep_schedule = options.prep;
  prep_schedule.seed = mix_seed(seed, 0xB0);
  anneal(chain, prep_objective, prep_schedule);

  DimerParams swept = params;
  swept.eps2 = eps2_schedule.front();
  DimerObjective objective(swept, options.start_site);

  ProposalPolicy policy;
  policy.sigma0 = options.sigma0;
  policy.sigma_floor = options.sigma_floor;

  // Leg labels from direction reversals of the declared schedule.
  std::vector<int> legs(eps2_schedule.size(), 0);
  {
    int leg = 0;
    int direction = 0;
    for (std::size_t k = 1; k < eps2_schedule.size(); ++k) {
      const int d = sign_of(eps2_schedule[k] - eps2_schedule[k - 1]);
      if (d != 0 && direction != 0 && d != direction) ++leg;
      if (d != 0) direction = d;
      legs[k] = leg;
    }
  }

  DimerSweepTrace trace;
  trace.seed = seed;
  trace.points.reserve(eps2_schedule.size());
  for (std::size_t k = 0; k < eps2_schedule.size(); ++k) {
    objective.set_eps2(eps2_schedule[k]);
    rescale_to_unit(chain.parameters);
    resync(chain, objective);
    hold(chain, objective, t0, options.sweeps_per_step, policy);
    trace.points.push_back({eps2_schedule[k],
                            objective.signed_occupation(chain.parameters),
                            chain.energy + objective.energy_offset(), legs[k]});
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Spinodal scan

double dimer_curve_energy(const DimerParams& params, double eps2, double s) {
  const double n1 = 0.5 * (1.0 + s);
  const double n2 = 0.5 * (1.0 - s);
  return params.eps1 * n1 + eps2 * n2 -
         params.t * std::sqrt((1.0 - s) * (1.0 + s)) -
         params.u * 0.5 * (1.0 + s * s);
}

namespace {

constexpr int kCurvePoints = 40001;

// Exact +-1 endpoints; the sqrt in the curve must never see |s| > 1.
double grid_s(int i, int n) {
  return static_cast<double>(2 * i - (n - 1)) / static_cast<double>(n - 1);
}

// Local minimum of E(s) on the requested side of s = 0, boundaries included.
bool side_minimum_exists(const DimerParams& params, double eps2,
                         bool positive_side) {
  const int n = kCurvePoints;
  double prev2 = 0.0, prev1 = 0.0;
  bool found = false;
  for (int i = 0; i < n && !found; ++i) {
    const double s = grid_s(i, n);
    const double e = dimer_curve_energy(params, eps2, s);
    if (i >= 2) {
      const double s_mid = grid_s(i - 1, n);
      const bool interior_min = prev1 < prev2 && prev1 <= e;
      if (interior_min && (positive_side ? s_mid > 0.0 : s_mid < 0.0))
        found = true;
    }
    if (i == 1 && !positive_side && prev1 < e) found = true;  // s = -1 boundary
    prev2 = prev1;
    prev1 = e;
  }
  if (!found && positive_side) {
    const double e_last = dimer_curve_energy(params, eps2, 1.0);
    const double e_prev = dimer_curve_energy(params, eps2, grid_s(n - 2, n));
    if (e_last < e_prev) found = true;  // s = +1 boundary
  }
  return found;
}

double bisect_threshold(const DimerParams& params, double lo, double hi,
                        bool positive_side, bool exists_at_hi_side) {
  // The indicator is monotone in eps2; bisect until the bracket is tight.
  const double tol = 1e-8 * std::max(1.0, params.u + params.t);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const bool exists = side_minimum_exists(params, mid, positive_side);
    if (exists == exists_at_hi_side)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SpinodalThresholds spinodal_thresholds(const DimerParams& params) {
  params.validate();
  if (params.u == 0.0 || params.t >= params.u)
    return {params.eps1, params.eps1};  // no metastable branch

  const double span = 2.0 * params.u + params.t + 1.0;
  // Forward: donor-side minimum survives down to some eps2 < eps1.
  const double forward = bisect_threshold(params, params.eps1 - span,
                                          params.eps1, true, true);
  // Backward: acceptor-side minimum survives up to some eps2 > eps1.
  const double backward = bisect_threshold(params, params.eps1,
                                           params.eps1 + span, false, false);
  return {forward, backward};
}

}  // namespace qhyst
