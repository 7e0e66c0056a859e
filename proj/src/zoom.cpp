#include "qamlz/zoom.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qamlz/errors.hpp"
#include "qamlz/eval.hpp"
#include "qamlz/random.hpp"

namespace qamlz {

namespace {

void check_schedule(const std::vector<double>& v, const char* name) {
  if (v.empty()) throw ArgumentError(std::string(name) + " schedule is empty");
  for (std::size_t t = 0; t < v.size(); ++t) {
    if (!(v[t] >= 0.0 && v[t] <= 1.0))
      throw ArgumentError(std::string(name) + " probabilities must lie in [0, 1]");
    if (t > 0 && v[t] > v[t - 1])
      throw ArgumentError(std::string(name) + " schedule must be non-increasing");
  }
}

// Seed streams inside one zoom run.
enum Stream : std::uint64_t { kAnneal = 1, kFlips = 2 };

}  // namespace

void ZoomConfig::validate() const {
  if (!(b > 0.0 && b < 1.0)) throw ArgumentError("zoom base b must lie in (0, 1)");
  if (iterations < 1) throw ArgumentError("zoom needs at least one iteration");
  check_schedule(p_flip, "p_f");
  check_schedule(q_flip, "q_f");
  const std::size_t horizon = std::max({iterations, p_flip.size(), q_flip.size()});
  for (std::size_t t = 0; t < horizon; ++t) {
    const double p = p_flip_at(t), q = q_flip_at(t);
    if (!(q < p || (p == 0.0 && q == 0.0)))
      throw ArgumentError("q_f(t) must be below p_f(t) at t = " + std::to_string(t));
  }
  if (excited_distance.empty() || excited_max.empty())
    throw ArgumentError("excited-state schedules are empty");
  for (double d : excited_distance)
    if (!(d >= 0.0)) throw ArgumentError("excited-state distance must be >= 0");
  for (std::size_t n : excited_max)
    if (n < 1) throw ArgumentError("excited-state cap must be >= 1");
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
    throw ArgumentError("keep fraction must lie in (0, 1]");
}

ZoomConfig& ZoomConfig::disable_flips() {
  p_flip = {0.0};
  q_flip = {0.0};
  return *this;
}

double sigma_at(double b, std::size_t t) {
  if (!(b > 0.0 && b < 1.0)) throw ArgumentError("zoom base b must lie in (0, 1)");
  return std::pow(b, static_cast<double>(t));
}

ZoomState update_mu(const ZoomState& state, std::span<const int> spins, double b) {
  if (spins.size() != state.mu.size())
    throw DimensionError("spin vector has " + std::to_string(spins.size()) +
                         " entries, weights have " + std::to_string(state.mu.size()));
  for (int s : spins)
    if (s != 1 && s != -1) throw ArgumentError("spins must be -1 or +1");
  ZoomState next;
  next.t = state.t + 1;
  next.sigma = sigma_at(b, next.t);
  next.mu = state.mu;
  for (std::size_t i = 0; i < spins.size(); ++i) next.mu[i] += spins[i] * next.sigma;
  return next;
}

namespace {

// Change of H-aug when coordinate i moves from `from` to `to`, others fixed.
double haug_delta(const CorrelationCache& cache, std::span<const double> mu, std::size_t i,
                  double from, double to) {
  const auto row = cache.quadratic.row(i);
  double coupled = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j)
    if (j != i) coupled += mu[j] * row[j];
  return (to - from) * (coupled - cache.linear[i]) / static_cast<double>(cache.n_examples);
}

}  // namespace

FlipOutcome regularize_flips(const ZoomState& before, const ZoomState& after,
                             std::span<const int> spins, const CorrelationCache& cache,
                             const ZoomConfig& cfg, std::size_t t, std::uint64_t seed) {
  const std::size_t n = spins.size();
  if (before.mu.size() != n || after.mu.size() != n || cache.size() != n)
    throw DimensionError("flip regularization dimensions do not match");

  const double p = cfg.p_flip_at(t);
  const double q = cfg.q_flip_at(t);
  FlipOutcome out{Spins(spins.begin(), spins.end()), {}};
  std::vector<double> mu = after.mu;
  const double step = after.sigma;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  if (p > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      // Energy at mu_i(t+1) minus energy with mu_i(t) held back.
      const double worse = -haug_delta(cache, mu, i, mu[i], before.mu[i]);
      if (worse > 0.0 && unit(rng) < p) {
        out.spins[i] = -out.spins[i];
        mu[i] = before.mu[i] + out.spins[i] * step;
        ++out.counts.conditional;
      }
    }
  }
  if (q > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (unit(rng) < q) {
        out.spins[i] = -out.spins[i];
        ++out.counts.uniform;
      }
    }
  }
  return out;
}

nlohmann::json to_json(const IterationRecord& r) {
  return {{"t", r.t},
          {"sigma", r.sigma},
          {"train_energy", r.train_energy},
          {"best_energy", r.best_energy},
          {"distinct_states", r.distinct_states},
          {"excited_states", r.excited_states},
          {"couplings", r.couplings},
          {"conditional_flips", r.flips.conditional},
          {"uniform_flips", r.flips.uniform},
          {"mu", r.mu}};
}

std::string to_json_lines(const ZoomTrace& trace) {
  std::ostringstream out;
  for (const auto& r : trace.records) out << to_json(r).dump() << '\n';
  return out.str();
}

ZoomResult run_zoom(const CorrelationCache& cache, const Solver& solver, const ZoomConfig& cfg) {
  cfg.validate();
  const std::size_t n = cache.size();
  if (n == 0) throw ArgumentError("zoom needs at least one classifier");

  ZoomResult result;
  ZoomState state = ZoomState::initial(n);
  std::vector<EnsembleMember> branches;

  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    const double sigma = sigma_at(cfg.b, t);
    IsingProblem problem = build_zoom(cache, state.mu, sigma);
    if (cfg.keep_fraction < 1.0 && problem.nonzero_couplings() > 0)
      problem = prune(problem, cfg.keep_fraction);

    AnnealResult anneal;
    try {
      anneal = solver.solve(problem, derive_seed(cfg.seed, {kAnneal, t}));
    } catch (const Error& e) {
      throw Error("zoom iteration " + std::to_string(t) + ": " + e.what());
    }
    if (anneal.states.empty())
      throw Error("zoom iteration " + std::to_string(t) + ": solver returned no states");

    const auto excited = select_excited(anneal, cfg.excited_at(t));
    const Spins& best = anneal.best().spins;
    const ZoomState proposed = update_mu(state, best, cfg.b);
    const auto flips =
        regularize_flips(state, proposed, best, cache, cfg, t, derive_seed(cfg.seed, {kFlips, t}));
    ZoomState next = update_mu(state, flips.spins, cfg.b);

    // Existing branches follow the main path's step.
    for (auto& br : branches)
      for (std::size_t i = 0; i < n; ++i) br.mu[i] += flips.spins[i] * next.sigma;
    for (std::size_t e = 1; e < excited.size(); ++e) {
      branches.push_back({update_mu(state, excited[e].spins, cfg.b).mu, t, excited[e].energy});
    }

    IterationRecord rec;
    rec.t = t;
    rec.sigma = sigma;
    rec.mu = next.mu;
    rec.train_energy = energy_haug(cache, next.mu);
    rec.best_energy = anneal.best().energy;
    rec.distinct_states = anneal.states.size();
    rec.excited_states = excited.size();
    rec.couplings = problem.nonzero_couplings();
    rec.flips = flips.counts;
    result.trace.records.push_back(std::move(rec));

    state = std::move(next);
  }

  result.ensemble.push_back({state.mu, EnsembleMember::npos, 0.0});
  for (auto& br : branches) result.ensemble.push_back(std::move(br));
  result.state = std::move(state);
  return result;
}

}  // namespace qamlz
