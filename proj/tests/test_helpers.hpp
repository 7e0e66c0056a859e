#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "qamlz/ising.hpp"
#include "qamlz/matrix.hpp"
#include "qamlz/weak.hpp"

namespace qamlz::testing {

inline IsingProblem random_problem(std::size_t n, std::mt19937_64& rng, double density = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution keep(density);
  std::vector<double> h(n);
  for (auto& v : h) v = u(rng);
  std::vector<Coupling> j;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (keep(rng)) j.push_back({a, b, u(rng)});
  return IsingProblem(std::move(h), std::move(j));
}

inline Spins spins_from_mask(std::uint64_t mask, std::size_t n) {
  Spins s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = (mask >> i) & 1U ? 1 : -1;
  return s;
}

inline Spins random_spins(std::size_t n, std::mt19937_64& rng) {
  Spins s(n);
  for (auto& v : s) v = (rng() & 1U) ? 1 : -1;
  return s;
}

// Every energy of the problem, from a dense double loop.
inline std::vector<double> brute_spectrum(const IsingProblem& p) {
  const std::size_t n = p.size();
  Matrix dense(n, n);
  for (const auto& c : p.couplings()) dense(c.i, c.j) = c.value;
  std::vector<double> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    const auto s = spins_from_mask(mask, n);
    double e = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      e += p.fields()[a] * s[a];
      for (std::size_t b = a + 1; b < n; ++b) e += dense(a, b) * s[a] * s[b];
    }
    out.push_back(e);
  }
  return out;
}

// Classifier outputs with arbitrary real values and random labels.
struct RandomInstance {
  Matrix outputs;
  std::vector<int> labels;
};

inline RandomInstance random_instance(std::size_t examples, std::size_t classifiers,
                                      std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RandomInstance inst{Matrix(examples, classifiers), std::vector<int>(examples)};
  for (std::size_t r = 0; r < examples; ++r) {
    for (std::size_t k = 0; k < classifiers; ++k) inst.outputs(r, k) = u(rng) / classifiers;
    inst.labels[r] = (rng() & 1U) ? 1 : -1;
  }
  return inst;
}

// sum_tau (y - sum_k w_k c_k)^2, written out independently of the library.
inline double direct_mse(const RandomInstance& inst, const std::vector<double>& w) {
  double total = 0.0;
  for (std::size_t r = 0; r < inst.outputs.rows(); ++r) {
    double pred = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) pred += w[k] * inst.outputs(r, k);
    total += (inst.labels[r] - pred) * (inst.labels[r] - pred);
  }
  return total;
}

}  // namespace qamlz::testing
