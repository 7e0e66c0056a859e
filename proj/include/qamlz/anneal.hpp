#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qamlz/ising.hpp"

namespace qamlz {

// Linear inverse-temperature schedule: sweep w (0-based) runs at
// beta_initial + w * (beta_final - beta_initial) / sweeps.
struct SaSchedule {
  double beta_initial = 0.1;
  double beta_final = 5.0;
  std::size_t sweeps = 1000;
  std::size_t reads = 1000;
  // Divide h and J by the problem's largest magnitude before annealing so the
  // beta range is measured in units of the strongest term. Reported energies
  // always refer to the unscaled problem.
  bool auto_scale = false;

  void validate() const;
  double beta_at(std::size_t sweep) const {
    return beta_initial + static_cast<double>(sweep) * (beta_final - beta_initial) /
                              static_cast<double>(sweeps);
  }
};

struct ExcitedStateCriteria {
  double distance = 0.0;       // relative energy distance d >= 0
  std::size_t max_states = 1;  // n_e >= 1
};

// Distinct states, ascending energy; states.front() is the best found.
struct AnnealResult {
  std::vector<SpinState> states;
  std::string solver_id;
  std::uint64_t seed = 0;

  const SpinState& best() const { return states.front(); }
};

// Probability of accepting a move with energy change delta at inverse temperature beta.
inline double metropolis_acceptance(double beta, double delta) {
  return delta <= 0.0 ? 1.0 : std::exp(-beta * delta);
}

// Result of a single annealing read; tracked_energy is the incrementally
// maintained energy, kept separate so it can be checked against energy_of().
struct ReadOutcome {
  Spins spins;
  double tracked_energy = 0.0;
};

ReadOutcome anneal_read(const IsingProblem& p, const SaSchedule& schedule, std::uint64_t read_seed);

// Read r uses derive_seed(seed, {r}); reads run in parallel and merge into a
// sorted, deduplicated result that does not depend on the thread count.
AnnealResult solve_sa(const IsingProblem& p, const SaSchedule& schedule, std::uint64_t seed);

inline constexpr std::size_t kExactMaxSpins = 24;

// Enumerates all 2^N states (N <= kExactMaxSpins) and returns them ascending,
// truncated to `limit` states when limit > 0.
AnnealResult solve_exact(const IsingProblem& p, std::size_t limit = 0);

// Lowest-energy states within relative distance d of the ground energy E0:
// E < (1 - d) E0 for E0 < 0, E < (1 + d) E0 for E0 > 0, E == 0 for E0 == 0.
// States exactly at E0 always qualify. At most max_states are returned.
std::vector<SpinState> select_excited(const AnnealResult& r, const ExcitedStateCriteria& crit);

class Solver {
 public:
  virtual ~Solver() = default;
  virtual AnnealResult solve(const IsingProblem& p, std::uint64_t seed) const = 0;
  virtual std::string id() const = 0;
};

class SimulatedAnnealer final : public Solver {
 public:
  explicit SimulatedAnnealer(SaSchedule schedule);
  AnnealResult solve(const IsingProblem& p, std::uint64_t seed) const override;
  std::string id() const override { return "sa"; }
  const SaSchedule& schedule() const noexcept { return schedule_; }

 private:
  SaSchedule schedule_;
};

class ExactSolver final : public Solver {
 public:
  explicit ExactSolver(std::size_t limit = 0) : limit_(limit) {}
  AnnealResult solve(const IsingProblem& p, std::uint64_t) const override;
  std::string id() const override { return "exact"; }

 private:
  std::size_t limit_;
};

}  // namespace qamlz
