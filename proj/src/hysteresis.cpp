#include "qhyst/hysteresis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <utility>

namespace qhyst {

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

void rescale_to_unit(std::vector<double>& p) {
  double norm = 0.0;
  for (double v : p) norm += v * v;
  const double scale = 1.0 / std::sqrt(norm);
  for (double& v : p) v *= scale;
}

ProposalPolicy mirror_policy(const ProposalPolicy& base, int m, bool mirrored) {
  ProposalPolicy policy = base;
  if (mirrored) {
    policy.sign.assign(2 * static_cast<std::size_t>(m), 1.0);
    for (int j = 0; j < m; ++j) policy.sign[m + j] = -1.0;
  }
  return policy;
}

}  // namespace

CycleSchedule CycleSchedule::standard(double v_max, int steps_per_leg,
                                      int sweeps_per_step, double t0) {
  CycleSchedule c;
  c.v_max = v_max;
  c.steps_per_leg = steps_per_leg;
  c.pattern = {0.0, v_max, -v_max, v_max};
  c.sweeps_per_step = sweeps_per_step;
  c.t0 = t0;
  return c;
}

void CycleSchedule::validate() const {
  if (!(v_max > 0.0) || !std::isfinite(v_max))
    throw ValidationError("cycle: v_max must be finite and > 0");
  if (steps_per_leg < 2)
    throw ValidationError("cycle: steps_per_leg must be >= 2");
  if (pattern.size() < 2)
    throw ValidationError("cycle: pattern needs at least two endpoints");
  for (double v : pattern)
    if (!std::isfinite(v)) throw ValidationError("cycle: non-finite pattern value");
  if (sweeps_per_step < 1)
    throw ValidationError("cycle: sweeps_per_step must be >= 1");
  if (!(t0 > 0.0))
    throw ValidationError("cycle: hold temperature t0 must be > 0");
}

std::vector<double> CycleSchedule::control_values() const {
  validate();
  std::vector<double> values;
  values.reserve(1 + (pattern.size() - 1) * steps_per_leg);
  values.push_back(pattern.front());
  for (std::size_t leg = 0; leg + 1 < pattern.size(); ++leg) {
    const double from = pattern[leg];
    const double to = pattern[leg + 1];
    for (int i = 1; i <= steps_per_leg; ++i) {
      values.push_back(i == steps_per_leg
                           ? to
                           : from + (to - from) * static_cast<double>(i) /
                                        static_cast<double>(steps_per_leg));
    }
  }
  return values;
}

std::vector<int> CycleSchedule::leg_labels() const {
  validate();
  std::vector<int> labels;
  labels.reserve(1 + (pattern.size() - 1) * steps_per_leg);
  labels.push_back(0);
  for (std::size_t leg = 0; leg + 1 < pattern.size(); ++leg)
    for (int i = 1; i <= steps_per_leg; ++i)
      labels.push_back(static_cast<int>(leg));
  return labels;
}

FourierCoefficients prepare_cycle_state(const EnergyModel& model,
                                        double v_first, StartSide side,
                                        double bias_magnitude, int m,
                                        const AnnealSchedule& schedule,
                                        std::uint64_t seed) {
  model.validate();
  schedule.validate();
  EnergyModel biased = model;
  biased.v0 = v_first + (side == StartSide::left ? -1.0 : 1.0) * bias_magnitude;

  BoxObjective objective(biased, m);
  Rng init_rng = Rng::stream(seed, 0xF0);
  ChainState chain = make_chain(objective, random_coefficient_vector(m, init_rng),
                                mix_seed(seed, 0xF1));
  anneal(chain, objective, schedule);

  // Remove the bias and relax into the unbiased minimum before the cycle.
  objective.set_tilt(v_first);
  rescale_to_unit(chain.parameters);
  resync(chain, objective);
  AnnealSchedule polish;
  polish.temps = {0.0};
  polish.cycles_per_temp = 50;
  polish.proposal_sigma0 = schedule.proposal_sigma0;
  polish.sigma_floor = schedule.sigma_floor;
  anneal(chain, objective, polish);

  rescale_to_unit(chain.parameters);
  return FourierCoefficients::from_flat(chain.parameters);
}

SweepTrace run_cycle(const EnergyModel& model,
                     const FourierCoefficients& initial,
                     const CycleSchedule& cycle, std::uint64_t seed,
                     bool mirrored) {
  model.validate();
  cycle.validate();
  initial.validate();

  const std::vector<double> controls = cycle.control_values();
  const std::vector<int> legs = cycle.leg_labels();
  const int m = initial.modes();

  EnergyModel start_model = model;
  start_model.v0 = controls.front();
  BoxObjective objective(start_model, m);
  ChainState chain =
      make_chain(objective, initial.flat(), mix_seed(seed, 0xCE));

  ProposalPolicy policy = mirror_policy(ProposalPolicy(), m, mirrored);

  SweepTrace trace;
  trace.seed = seed;
  trace.model = start_model;
  trace.points.reserve(controls.size());

  for (std::size_t k = 0; k < controls.size(); ++k) {
    try {
      objective.set_tilt(controls[k]);
      rescale_to_unit(chain.parameters);
      resync(chain, objective);
      const std::uint64_t p0 = chain.propose_count;
      const std::uint64_t a0 = chain.accept_count;
      hold(chain, objective, cycle.t0, cycle.sweeps_per_step, policy);
      const std::uint64_t proposed = chain.propose_count - p0;
      const double acceptance =
          proposed == 0 ? 0.0
                        : static_cast<double>(chain.accept_count - a0) /
                              static_cast<double>(proposed);
      trace.points.push_back({controls[k], objective.expectation_x_over_a(),
                              chain.energy, acceptance, legs[k]});
    } catch (const ChainError& err) {
      trace.abort_reason = err.what();
      break;
    }
  }
  return trace;
}

LoopSummary extract_thresholds(std::span<const double> control,
                               std::span<const double> response,
                               std::span<const int> legs, double jump_min) {
  if (control.empty() || control.size() != response.size() ||
      control.size() != legs.size())
    throw ValidationError("extract_thresholds: empty or mismatched trace");
  if (!(jump_min > 0.0))
    throw ValidationError("extract_thresholds: jump_min must be > 0");

  LoopSummary out;
  int last_up_leg = -1, last_down_leg = -1;
  for (std::size_t i = 0; i + 1 < control.size(); ++i) {
    if (legs[i] != legs[i + 1]) continue;
    const double dv = control[i + 1] - control[i];
    const double dr = response[i + 1] - response[i];
    if (std::abs(dr) <= jump_min) continue;
    const double mid = 0.5 * (control[i] + control[i + 1]);
    const int dir = sign_of(dv);
    if (dir > 0) {
      if (legs[i] == last_up_leg) out.ambiguous = true;
      last_up_leg = legs[i];
      out.threshold_up = mid;
      out.jumped_up = true;
    } else if (dir < 0) {
      if (legs[i] == last_down_leg) out.ambiguous = true;
      last_down_leg = legs[i];
      out.threshold_down = mid;
      out.jumped_down = true;
    }
  }
  if (out.ambiguous) {
    out.threshold_up.reset();
    out.threshold_down.reset();
  }

  // Closed portion: from the first visit to the final control value onward.
  const double v_end = control.back();
  double scale = 0.0;
  for (double v : control) scale = std::max(scale, std::abs(v));
  std::size_t start = control.size() - 1;
  for (std::size_t i = 0; i < control.size(); ++i) {
    if (std::abs(control[i] - v_end) <= 1e-12 * std::max(scale, 1.0)) {
      start = i;
      break;
    }
  }
  double area = 0.0;
  for (std::size_t i = start; i + 1 < control.size(); ++i)
    area += 0.5 * (response[i] + response[i + 1]) * (control[i + 1] - control[i]);
  out.loop_area = std::abs(area);
  return out;
}

LoopSummary extract_thresholds(const SweepTrace& trace, double jump_min) {
  std::vector<double> control, response;
  std::vector<int> legs;
  control.reserve(trace.points.size());
  response.reserve(trace.points.size());
  legs.reserve(trace.points.size());
  for (const CyclePoint& p : trace.points) {
    control.push_back(p.v0);
    response.push_back(p.x_mean);
    legs.push_back(p.leg);
  }
  return extract_thresholds(control, response, legs, jump_min);
}

std::vector<LoopSummary> beta_scan(double gamma, std::span<const double> betas,
                                   const BoxSpec& box,
                                   const CycleSchedule& cycle,
                                   std::uint64_t seed,
                                   const BetaScanOptions& options) {
  if (betas.empty()) throw ValidationError("beta_scan: empty beta list");
  for (double beta : betas)
    if (!(beta <= 0.0) || !std::isfinite(beta))
      throw ValidationError("beta_scan: every beta must be finite and <= 0");
  cycle.validate();

  auto run_one = [&](double beta) {
    EnergyModel model;
    model.gamma = gamma;
    model.beta = beta;
    model.box = box;
    AnnealSchedule prep = options.prep;
    prep.seed = seed;
    const FourierCoefficients initial = prepare_cycle_state(
        model, cycle.pattern.front(), options.start, 0.01 * cycle.v_max,
        options.m, prep, seed);
    const SweepTrace trace = run_cycle(model, initial, cycle, seed);
    return extract_thresholds(trace, options.jump_min);
  };

  std::vector<std::future<LoopSummary>> futures;
  futures.reserve(betas.size());
  for (double beta : betas)
    futures.push_back(std::async(std::launch::async, run_one, beta));
  std::vector<LoopSummary> out;
  out.reserve(betas.size());
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

CalibrationScan bifurcation_scan(double gamma, const BoxSpec& box,
                                 std::span<const double> beta_range,
                                 const AnnealSchedule& schedule,
                                 const BifurcationOptions& options) {
  if (beta_range.empty())
    throw ValidationError("bifurcation_scan: empty beta range");
  for (std::size_t i = 0; i < beta_range.size(); ++i) {
    if (!(beta_range[i] <= 0.0) || !std::isfinite(beta_range[i]))
      throw ValidationError("bifurcation_scan: betas must be finite and <= 0");
    if (i > 0 && beta_range[i] > beta_range[i - 1])
      throw ValidationError(
          "bifurcation_scan: range must move toward stronger nonlinearity");
  }
  schedule.validate();
  options.probe.validate();

  auto run_point = [&](std::size_t idx) {
    const double beta = beta_range[idx];
    EnergyModel model;
    model.gamma = gamma;
    model.beta = beta;
    model.box = box;

    // Localization order parameter from tilt-free anneals.
    double order = 0.0;
    for (int s = 0; s < options.order_seeds; ++s) {
      BoxObjective objective(model, options.m);
      Rng init_rng = Rng::stream(schedule.seed, 0xA000 + 17 * idx + s);
      ChainState chain =
          make_chain(objective, random_coefficient_vector(options.m, init_rng),
                     mix_seed(schedule.seed, 0xB000 + 17 * idx + s));
      anneal(chain, objective, schedule);
      order += std::abs(objective.expectation_x_over_a());
    }
    order /= options.order_seeds;

    AnnealSchedule prep = schedule;
    prep.seed = schedule.seed;
    const FourierCoefficients initial = prepare_cycle_state(
        model, options.probe.pattern.front(), StartSide::left,
        0.01 * options.probe.v_max, options.m, prep, schedule.seed);
    const SweepTrace trace =
        run_cycle(model, initial, options.probe, schedule.seed);
    const LoopSummary summary = extract_thresholds(trace, 0.2);
    return BifurcationPoint{beta, order, summary.loop_area};
  };

  std::vector<std::future<BifurcationPoint>> futures;
  futures.reserve(beta_range.size());
  for (std::size_t i = 0; i < beta_range.size(); ++i)
    futures.push_back(std::async(std::launch::async, run_point, i));

  CalibrationScan scan;
  scan.area_floor = options.area_floor;
  for (auto& f : futures) scan.points.push_back(f.get());
  for (const BifurcationPoint& p : scan.points) {
    if (p.probe_area > options.area_floor) {
      scan.strong_beta = p.beta;
      break;
    }
  }
  return scan;
}

}  // namespace qhyst
