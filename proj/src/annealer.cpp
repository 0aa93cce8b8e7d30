#include "qhyst/annealer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>
#include <utility>

namespace qhyst {

namespace {

// Full re-evaluation cadence inside long runs; bounds incremental-cache
// drift and keeps the coherence check cheap.
constexpr std::uint64_t kResyncSweeps = 256;

std::string describe(double value) { return std::to_string(value); }

}  // namespace

FunctionObjective::FunctionObjective(
    std::size_t dimension, std::function<double(std::span<const double>)> fn)
    : dim_(dimension), fn_(std::move(fn)) {
  if (dim_ == 0) throw ValidationError("objective: dimension must be positive");
}

double FunctionObjective::evaluate(std::span<const double> params) {
  if (params.size() != dim_)
    throw ValidationError("objective: parameter size mismatch");
  params_.assign(params.begin(), params.end());
  pending_ = false;
  return fn_(params_);
}

double FunctionObjective::propose(std::size_t index, double delta) {
  pending_index_ = index;
  pending_delta_ = delta;
  pending_ = true;
  params_[index] += delta;
  const double e = fn_(params_);
  params_[index] -= delta;
  return e;
}

void FunctionObjective::accept() {
  if (pending_) params_[pending_index_] += pending_delta_;
  pending_ = false;
}

void FunctionObjective::reject() { pending_ = false; }

AnnealSchedule AnnealSchedule::linear(int n_temps, int cycles,
                                      std::uint64_t seed) {
  if (n_temps < 2) throw ValidationError("schedule: need at least 2 temperatures");
  AnnealSchedule s;
  s.temps.resize(n_temps);
  for (int k = 0; k < n_temps; ++k)
    s.temps[k] = static_cast<double>(n_temps - 1 - k) /
                 static_cast<double>(n_temps - 1);
  s.cycles_per_temp = cycles;
  s.seed = seed;
  return s;
}

AnnealSchedule AnnealSchedule::geometric(int n_temps, double t_first,
                                         double t_last, int cycles,
                                         std::uint64_t seed) {
  if (n_temps < 3) throw ValidationError("schedule: need at least 3 temperatures");
  if (!(t_first > t_last) || !(t_last > 0.0))
    throw ValidationError("schedule: geometric ladder needs t_first > t_last > 0");
  AnnealSchedule s;
  s.temps.resize(n_temps);
  const double ratio = std::pow(t_last / t_first, 1.0 / (n_temps - 2));
  double t = t_first;
  for (int k = 0; k + 1 < n_temps; ++k) {
    s.temps[k] = t;
    t *= ratio;
  }
  s.temps.back() = 0.0;  // finish with a strict-descent stage
  s.cycles_per_temp = cycles;
  s.seed = seed;
  return s;
}

void AnnealSchedule::validate() const {
  if (temps.empty()) throw ValidationError("schedule: empty temperature ladder");
  for (std::size_t k = 0; k < temps.size(); ++k) {
    if (!std::isfinite(temps[k]) || temps[k] < 0.0)
      throw ValidationError("schedule: temperatures must be finite and >= 0");
    if (k > 0 && temps[k] > temps[k - 1])
      throw ValidationError("schedule: temperatures must be non-increasing");
  }
  if (cycles_per_temp < 1)
    throw ValidationError("schedule: cycles_per_temp must be >= 1");
  if (!(proposal_sigma0 >= 0.0))
    throw ValidationError("schedule: proposal_sigma0 must be >= 0");
  if (!(sigma_floor > 0.0))
    throw ValidationError("schedule: sigma_floor must be > 0");
}

double ProposalPolicy::sigma_at(double temperature) const {
  return std::max(sigma0 * temperature, sigma_floor);
}

ProposalPolicy ProposalPolicy::from(const AnnealSchedule& schedule) {
  ProposalPolicy p;
  p.sigma0 = schedule.proposal_sigma0;
  p.sigma_floor = schedule.sigma_floor;
  return p;
}

ChainState make_chain(Objective& objective, std::vector<double> initial,
                      std::uint64_t seed) {
  if (initial.size() != objective.dimension())
    throw ValidationError("chain: initial vector size does not match objective");
  ChainState state;
  state.parameters = std::move(initial);
  state.rng = Rng(seed);
  state.energy = objective.evaluate(state.parameters);
  if (!std::isfinite(state.energy))
    throw ChainError("chain: objective non-finite at the initial state");
  return state;
}

void metropolis_step(ChainState& state, Objective& objective,
                     double temperature, const ProposalPolicy& policy) {
  if (!(temperature >= 0.0))
    throw ValidationError("metropolis: temperature must be >= 0");
  const std::size_t index = state.rng.index(objective.dimension());
  double delta = state.rng.gaussian() * policy.sigma_at(temperature);
  if (!policy.sign.empty()) delta *= policy.sign[index];

  const double trial = objective.propose(index, delta);
  if (!std::isfinite(trial))
    throw ChainError("metropolis: objective returned a non-finite energy at index " +
                     std::to_string(index) + ", T = " + describe(temperature));
  ++state.propose_count;

  const double d_e = trial - state.energy;
  bool take = false;
  if (temperature == 0.0) {
    take = d_e < 0.0;
  } else if (d_e <= 0.0) {
    take = true;
  } else {
    take = state.rng.uniform() < std::exp(-d_e / temperature);
  }

  if (take) {
    state.parameters[index] += delta;
    state.energy = trial;
    ++state.accept_count;
    objective.accept();
  } else {
    objective.reject();
  }
}

void sweep(ChainState& state, Objective& objective, double temperature,
           const ProposalPolicy& policy) {
  const std::size_t dim = objective.dimension();
  for (std::size_t k = 0; k < dim; ++k)
    metropolis_step(state, objective, temperature, policy);
}

void resync(ChainState& state, Objective& objective) {
  const double e = objective.evaluate(state.parameters);
  if (!std::isfinite(e))
    throw ChainError("chain: objective non-finite during resync");
  const double drift = std::abs(e - state.energy);
  if (drift > 1e-6 * std::max(1.0, std::abs(e)))
    throw ChainError("chain: cached energy drifted from a full re-evaluation by " +
                     describe(drift));
  state.energy = e;
}

void anneal(ChainState& state, Objective& objective,
            const AnnealSchedule& schedule) {
  anneal(state, objective, schedule, ProposalPolicy::from(schedule));
}

void anneal(ChainState& state, Objective& objective,
            const AnnealSchedule& schedule, const ProposalPolicy& policy) {
  schedule.validate();
  std::uint64_t sweeps_done = 0;
  for (double t : schedule.temps) {
    for (int c = 0; c < schedule.cycles_per_temp; ++c) {
      sweep(state, objective, t, policy);
      if (++sweeps_done % kResyncSweeps == 0) resync(state, objective);
    }
  }
  resync(state, objective);
}

void hold(ChainState& state, Objective& objective, double t0, int sweeps,
          const ProposalPolicy& policy) {
  if (!(t0 > 0.0))
    throw ValidationError("hold: T0 must be positive (stochastic stability probe)");
  if (sweeps < 0) throw ValidationError("hold: sweep count must be >= 0");
  for (int s = 0; s < sweeps; ++s) {
    sweep(state, objective, t0, policy);
    if ((s + 1) % static_cast<int>(kResyncSweeps) == 0) resync(state, objective);
  }
}

ConvergenceReport convergence_check(const DoublingProblem& problem,
                                    const AnnealSchedule& schedule,
                                    int m_small) {
  if (m_small < 4) throw ValidationError("convergence_check: m_small must be >= 4");
  schedule.validate();

  // The rng streams do not depend on m: a problem whose dimension ignores m
  // (the dimer) then runs twice identically and reports a zero delta.
  auto run = [&](int m) {
    auto objective = problem.make_objective(m);
    Rng init_rng = Rng::stream(schedule.seed, 0x5EED);
    std::vector<double> initial = problem.make_initial(m, init_rng);
    ChainState state =
        make_chain(*objective, std::move(initial), mix_seed(schedule.seed, 0xC4A1));
    anneal(state, *objective, schedule);
    const double obs = problem.observable(*objective, state.parameters);
    return std::pair<double, double>{state.energy, obs};
  };

  auto large_future = std::async(std::launch::async, run, 2 * m_small);
  const auto [e_small, obs_small] = run(m_small);
  const auto [e_large, obs_large] = large_future.get();

  auto rel = [](double a, double b) {
    return std::abs(b - a) / std::max(std::abs(a), 1e-12);
  };

  ConvergenceReport report;
  report.m_small = m_small;
  report.m_large = 2 * m_small;
  report.e_small = e_small;
  report.e_large = e_large;
  report.observable_small = obs_small;
  report.observable_large = obs_large;
  report.relative_delta = std::max(rel(e_small, e_large), rel(obs_small, obs_large));
  return report;
}

}  // namespace qhyst
