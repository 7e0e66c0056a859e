#include "qamlz/anneal.hpp"

#include <algorithm>
#include <cmath>

#include "qamlz/errors.hpp"
#include "qamlz/random.hpp"

namespace qamlz {

void SaSchedule::validate() const {
  if (!(beta_initial > 0.0 && beta_initial < beta_final))
    throw ArgumentError("schedule needs 0 < beta_initial < beta_final");
  if (sweeps < 1) throw ArgumentError("schedule needs at least one sweep");
  if (reads < 1) throw ArgumentError("schedule needs at least one read");
}

namespace {

// Symmetric adjacency in compressed rows.
struct Adjacency {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> neighbors;
  std::vector<double> weights;

  explicit Adjacency(const IsingProblem& p, double scale) : offsets(p.size() + 1, 0) {
    for (const auto& c : p.couplings()) {
      ++offsets[c.i + 1];
      ++offsets[c.j + 1];
    }
    for (std::size_t i = 0; i < p.size(); ++i) offsets[i + 1] += offsets[i];
    neighbors.resize(offsets.back());
    weights.resize(offsets.back());
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (const auto& c : p.couplings()) {
      neighbors[fill[c.i]] = c.j;
      weights[fill[c.i]++] = c.value * scale;
      neighbors[fill[c.j]] = c.i;
      weights[fill[c.j]++] = c.value * scale;
    }
  }
};

struct StateLess {
  bool operator()(const SpinState& a, const SpinState& b) const {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.spins < b.spins;
  }
};

void sort_unique(std::vector<SpinState>& states) {
  std::sort(states.begin(), states.end(), StateLess{});
  states.erase(std::unique(states.begin(), states.end(),
                           [](const SpinState& a, const SpinState& b) { return a.spins == b.spins; }),
               states.end());
}

// Uniform in [0, 1) with 53 random bits.
inline double unit_real(SplitMix64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Multiply-shift reduction onto [0, n); bias is below n / 2^32.
inline std::size_t pick_index(SplitMix64& rng, std::size_t n) {
  return static_cast<std::size_t>(((rng() >> 32) * static_cast<std::uint64_t>(n)) >> 32);
}

ReadOutcome run_read(const IsingProblem& p, const Adjacency& adj, double scale,
                     const SaSchedule& schedule, std::uint64_t read_seed) {
  const std::size_t n = p.size();
  SplitMix64 rng(read_seed);

  ReadOutcome out;
  out.spins.resize(n);
  for (auto& s : out.spins) s = (rng() & 1U) ? 1 : -1;
  if (n == 0) return out;

  // local[i] = h_i + sum_j J_ij s_j on the scaled problem
  std::vector<double> local(n);
  double energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = p.fields()[i] * scale;
    double pair = 0.0;
    for (std::size_t k = adj.offsets[i]; k < adj.offsets[i + 1]; ++k)
      pair += adj.weights[k] * out.spins[adj.neighbors[k]];
    local[i] = f + pair;
    energy += out.spins[i] * (f + 0.5 * pair);
  }

  for (std::size_t w = 0; w < schedule.sweeps; ++w) {
    const double beta = schedule.beta_at(w);
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t i = pick_index(rng, n);
      const double delta = -2.0 * out.spins[i] * local[i];
      if (delta > 0.0) {
        const double u = unit_real(rng);
        const double x = beta * delta;
        // exp(-x) is below the smallest nonzero u once x > 40, so only u == 0
        // can still accept; this skips the exp without changing the outcome.
        if (x > 40.0 ? u != 0.0 : u >= std::exp(-x)) continue;
      }
      const int old = out.spins[i];
      out.spins[i] = -old;
      energy += delta;
      for (std::size_t k = adj.offsets[i]; k < adj.offsets[i + 1]; ++k)
        local[adj.neighbors[k]] -= 2.0 * old * adj.weights[k];
    }
  }
  out.tracked_energy = energy / scale;
  return out;
}

double scale_for(const IsingProblem& p, const SaSchedule& schedule) {
  if (!schedule.auto_scale) return 1.0;
  const double m = p.max_magnitude();
  return m > 0.0 ? 1.0 / m : 1.0;
}

}  // namespace

ReadOutcome anneal_read(const IsingProblem& p, const SaSchedule& schedule, std::uint64_t read_seed) {
  schedule.validate();
  const double scale = scale_for(p, schedule);
  return run_read(p, Adjacency(p, scale), scale, schedule, read_seed);
}

AnnealResult solve_sa(const IsingProblem& p, const SaSchedule& schedule, std::uint64_t seed) {
  schedule.validate();
  const double scale = scale_for(p, schedule);
  const Adjacency adj(p, scale);

  std::vector<SpinState> states(schedule.reads);
  const auto reads = static_cast<long long>(schedule.reads);
#pragma omp parallel for schedule(dynamic)
  for (long long r = 0; r < reads; ++r) {
    auto read = run_read(p, adj, scale, schedule, derive_seed(seed, {static_cast<std::uint64_t>(r)}));
    const double e = energy_of(p, read.spins);
    states[static_cast<std::size_t>(r)] = SpinState{std::move(read.spins), e};
  }
  sort_unique(states);
  return AnnealResult{std::move(states), "sa", seed};
}

AnnealResult solve_exact(const IsingProblem& p, std::size_t limit) {
  const std::size_t n = p.size();
  if (n > kExactMaxSpins)
    throw CapabilityError("exact solver enumerates at most " + std::to_string(kExactMaxSpins) +
                          " spins, problem has " + std::to_string(n));

  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<SpinState> states;
  states.reserve(limit > 0 ? std::min<std::uint64_t>(total, 2 * limit) : total);
  Spins s(n);
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (std::size_t i = 0; i < n; ++i) s[i] = (mask >> i) & 1U ? 1 : -1;
    states.push_back({s, energy_of(p, s)});
    // Keep memory bounded when only the lowest states are wanted.
    if (limit > 0 && states.size() >= 4 * limit + 1024) {
      std::nth_element(states.begin(), states.begin() + static_cast<std::ptrdiff_t>(limit),
                       states.end(), StateLess{});
      states.resize(limit);
    }
  }
  sort_unique(states);
  if (limit > 0 && states.size() > limit) states.resize(limit);
  return AnnealResult{std::move(states), "exact", 0};
}

std::vector<SpinState> select_excited(const AnnealResult& r, const ExcitedStateCriteria& crit) {
  if (r.states.empty()) throw ArgumentError("anneal result has no states");
  if (!(crit.distance >= 0.0)) throw ArgumentError("excited-state distance must be >= 0");
  if (crit.max_states < 1) throw ArgumentError("excited-state cap must be >= 1");

  const double ground = r.best().energy;
  const double threshold = ground < 0.0   ? (1.0 - crit.distance) * ground
                           : ground > 0.0 ? (1.0 + crit.distance) * ground
                                          : 0.0;
  std::vector<SpinState> out;
  for (const auto& st : r.states) {
    if (out.size() >= crit.max_states) break;
    const bool passes = st.energy == ground || (ground != 0.0 && st.energy < threshold);
    if (!passes) break;  // states are sorted, nothing later can pass
    out.push_back(st);
  }
  return out;
}

SimulatedAnnealer::SimulatedAnnealer(SaSchedule schedule) : schedule_(schedule) {
  schedule_.validate();
}

AnnealResult SimulatedAnnealer::solve(const IsingProblem& p, std::uint64_t seed) const {
  return solve_sa(p, schedule_, seed);
}

AnnealResult ExactSolver::solve(const IsingProblem& p, std::uint64_t) const {
  return solve_exact(p, limit_);
}

}  // namespace qamlz
