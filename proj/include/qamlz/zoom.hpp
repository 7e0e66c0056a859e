#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qamlz/anneal.hpp"
#include "qamlz/weak.hpp"

namespace qamlz {

// Parameters of the zooming loop. Per-iteration schedules shorter than the
// iteration count repeat their last element.
struct ZoomConfig {
  double b = 0.5;
  std::size_t iterations = 8;
  std::vector<double> p_flip{0.16, 0.08, 0.04, 0.02, 0.01};
  std::vector<double> q_flip{0.08, 0.04, 0.02, 0.01, 0.005};
  std::vector<double> excited_distance{0.08, 0.04, 0.02, 0.01};
  std::vector<std::size_t> excited_max{16, 4, 1};
  double keep_fraction = 0.05;
  // Hardware gauge counts; carried for provenance only, never executed.
  std::vector<std::size_t> gauges{50, 10, 1};
  std::uint64_t seed = 0;

  // Throws ArgumentError. Flip schedules must be non-increasing with
  // q_flip(t) < p_flip(t), or both zero (flips disabled).
  void validate() const;

  double p_flip_at(std::size_t t) const { return at(p_flip, t); }
  double q_flip_at(std::size_t t) const { return at(q_flip, t); }
  ExcitedStateCriteria excited_at(std::size_t t) const {
    return {at(excited_distance, t), at(excited_max, t)};
  }

  // Sets p_f = q_f = 0.
  ZoomConfig& disable_flips();

 private:
  template <class T>
  static T at(const std::vector<T>& v, std::size_t t) {
    return v.empty() ? T{} : v[std::min(t, v.size() - 1)];
  }
};

double sigma_at(double b, std::size_t t);

// Weights mu(t) around which iteration t searches with breadth sigma = b^t.
struct ZoomState {
  std::vector<double> mu;
  std::size_t t = 0;
  double sigma = 1.0;

  static ZoomState initial(std::size_t n) { return {std::vector<double>(n, 0.0), 0, 1.0}; }
};

// mu(t+1) = mu(t) + s * b^(t+1).
ZoomState update_mu(const ZoomState& state, std::span<const int> spins, double b);

struct FlipCounts {
  std::size_t conditional = 0;
  std::size_t uniform = 0;
};

struct FlipOutcome {
  Spins spins;
  FlipCounts counts;
};

// Two-step randomization after an update from `before` to `after` with spins s:
//  1. ascending i: if the H-aug energy with mu_i(t+1) is above the energy with
//     mu_i(t) held back (other coordinates at their current values), flip s_i
//     with probability p_flip(t);
//  2. flip every s_i independently with probability q_flip(t).
// Callers recompute mu(t+1) from the returned spins with update_mu.
FlipOutcome regularize_flips(const ZoomState& before, const ZoomState& after,
                             std::span<const int> spins, const CorrelationCache& cache,
                             const ZoomConfig& cfg, std::size_t t, std::uint64_t seed);

struct IterationRecord {
  std::size_t t = 0;
  double sigma = 1.0;
  std::vector<double> mu;        // mu(t+1) after flips
  double train_energy = 0.0;     // H-aug of mu(t+1)
  double best_energy = 0.0;      // lowest anneal energy at this iteration
  std::size_t distinct_states = 0;
  std::size_t excited_states = 0;
  std::size_t couplings = 0;     // after pruning
  FlipCounts flips;
};

struct ZoomTrace {
  std::vector<IterationRecord> records;
};

nlohmann::json to_json(const IterationRecord& r);
// One JSON object per line.
std::string to_json_lines(const ZoomTrace& trace);

// A classifier weighting in the final ensemble. spawned_at is the iteration
// whose excited state created the branch, or npos for the main path.
struct EnsembleMember {
  std::vector<double> mu;
  std::size_t spawned_at = npos;
  double spawn_energy = 0.0;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct ZoomResult {
  ZoomState state;
  std::vector<EnsembleMember> ensemble;  // main path first
  ZoomTrace trace;
};

// Iterates t = 0..T-1: build_zoom -> prune -> solve -> update_mu ->
// regularize_flips. Excited states other than the best branch off the main
// path; a branch is not annealed again but follows the main path's later
// steps, so it differs from the main weights only in the step it branched on.
ZoomResult run_zoom(const CorrelationCache& cache, const Solver& solver, const ZoomConfig& cfg);

}  // namespace qamlz
