#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "qhyst/errors.hpp"
#include "qhyst/rng.hpp"

namespace qhyst {

// Objective over a real coefficient vector.
//
// The chain owns the parameter vector and drives the protocol
//   evaluate(p)   full evaluation at p; resets any incremental caches
//   propose(i,d)  energy of the state with p[i] += d applied
//   accept()      commit the pending proposal
//   reject()      discard it
// Implementations may cache whatever makes propose() cheap. The engine
// re-evaluates periodically and fails loudly if the cache drifts from the
// parameters the chain holds.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::size_t dimension() const = 0;
  virtual double evaluate(std::span<const double> params) = 0;
  virtual double propose(std::size_t index, double delta) = 0;
  virtual void accept() = 0;
  virtual void reject() = 0;
};

// Wraps a plain function of the parameter vector; proposals re-evaluate from
// scratch. Fine for cheap objectives and tests.
class FunctionObjective final : public Objective {
 public:
  FunctionObjective(std::size_t dimension,
                    std::function<double(std::span<const double>)> fn);

  std::size_t dimension() const override { return dim_; }
  double evaluate(std::span<const double> params) override;
  double propose(std::size_t index, double delta) override;
  void accept() override;
  void reject() override;

 private:
  std::size_t dim_;
  std::function<double(std::span<const double>)> fn_;
  std::vector<double> params_;
  std::size_t pending_index_ = 0;
  double pending_delta_ = 0.0;
  bool pending_ = false;
};

// Artificial-temperature ladder. The default is the linear descent from
// T = 1 to T = 0; a geometric ladder (with an exact final zero) is available
// as an option. The seed is consumed by the drivers that build chains from a
// schedule; anneal() itself draws from the chain's own generator.
struct AnnealSchedule {
  std::vector<double> temps;        // non-increasing, all >= 0
  int cycles_per_temp = 10000;      // sweeps per temperature
  double proposal_sigma0 = 0.3;     // sigma(T) = max(sigma0 * T, sigma_floor)
  double sigma_floor = 1e-3;
  std::uint64_t seed = 0;

  static AnnealSchedule linear(int n_temps = 20, int cycles = 10000,
                               std::uint64_t seed = 0);
  static AnnealSchedule geometric(int n_temps, double t_first, double t_last,
                                  int cycles, std::uint64_t seed = 0);
  void validate() const;
};

// Single-coefficient Gaussian proposals of width sigma(T). The optional sign
// vector flips the applied delta per index; mirrored experiments use it to
// conjugate the proposal stream under parity.
struct ProposalPolicy {
  double sigma0 = 0.3;
  double sigma_floor = 1e-3;
  std::vector<double> sign;  // empty = all +1

  double sigma_at(double temperature) const;
  static ProposalPolicy from(const AnnealSchedule& schedule);
};

struct ChainState {
  std::vector<double> parameters;
  double energy = 0.0;
  std::uint64_t accept_count = 0;
  std::uint64_t propose_count = 0;
  Rng rng;
};

ChainState make_chain(Objective& objective, std::vector<double> initial,
                      std::uint64_t seed);

// One proposal: index uniform over coordinates, delta ~ N(0, sigma(T)^2),
// accepted with min(1, exp(-dE/T)); at T = 0 accepted iff dE < 0.
void metropolis_step(ChainState& state, Objective& objective,
                     double temperature, const ProposalPolicy& policy);

// One sweep = one proposal per coefficient.
void sweep(ChainState& state, Objective& objective, double temperature,
           const ProposalPolicy& policy);

// Full re-evaluation of the cached energy, with a drift check.
void resync(ChainState& state, Objective& objective);

void anneal(ChainState& state, Objective& objective,
            const AnnealSchedule& schedule);
void anneal(ChainState& state, Objective& objective,
            const AnnealSchedule& schedule, const ProposalPolicy& policy);

// Fixed-temperature sweeps between control-parameter steps; T0 acts as the
// stochastic perturbation probing the stability of the current minimum.
void hold(ChainState& state, Objective& objective, double t0, int sweeps,
          const ProposalPolicy& policy);

struct ConvergenceReport {
  int m_small = 0;
  int m_large = 0;
  double e_small = 0.0;
  double e_large = 0.0;
  double observable_small = 0.0;
  double observable_large = 0.0;
  double relative_delta = 0.0;
};

// Problem factory for the coefficient-doubling check: given a coefficient
// count, produce the objective, a deterministic initial vector, and the
// scalar observable reported alongside the converged energy.
struct DoublingProblem {
  std::function<std::unique_ptr<Objective>(int m)> make_objective;
  std::function<std::vector<double>(int m, Rng& rng)> make_initial;
  std::function<double(Objective& objective, std::span<const double> params)>
      observable;
};

// Anneals the same problem at m and 2m coefficients with matched seeds and
// reports the relative energy/observable deltas. The two chains run
// concurrently; results merge in a fixed order.
ConvergenceReport convergence_check(const DoublingProblem& problem,
                                    const AnnealSchedule& schedule,
                                    int m_small);

}  // namespace qhyst
