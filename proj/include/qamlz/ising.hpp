#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "qamlz/weak.hpp"

namespace qamlz {

using Spins = std::vector<int>;
using GaugeVector = std::vector<int>;

struct Coupling {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;

  bool operator==(const Coupling&) const = default;
};

// E(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j.
// Couplings are kept sorted by (i, j) with i < j and no duplicates.
class IsingProblem {
 public:
  IsingProblem() = default;
  IsingProblem(std::vector<double> fields, std::vector<Coupling> couplings);

  std::size_t size() const noexcept { return fields_.size(); }
  const std::vector<double>& fields() const noexcept { return fields_; }
  const std::vector<Coupling>& couplings() const noexcept { return couplings_; }
  std::size_t nonzero_couplings() const;
  // Largest |h_i| or |J_ij|; 0 for an all-zero problem.
  double max_magnitude() const;

  bool operator==(const IsingProblem&) const = default;

 private:
  std::vector<double> fields_;
  std::vector<Coupling> couplings_;
};

struct SpinState {
  Spins spins;
  double energy = 0.0;
};

// Throws DimensionError for a size mismatch, ArgumentError for non +-1 entries.
void check_spins(const IsingProblem& p, std::span<const int> s);
double energy_of(const IsingProblem& p, std::span<const int> s);

// Baseline Hamiltonian: h_i = lambda - C_i + 1/2 sum_{j>i} C_ij,  J_ij = C_ij / 4.
IsingProblem build_qaml(const CorrelationCache& cache, double lambda);

// Zoom Hamiltonian at breadth sigma around weights mu:
//   h_i = sigma * (-C_i + sum_j mu_j C_ij)   (j = i included)
//   J_ij = sigma^2 * C_ij
// so that H(s) - H(s') equals half the squared-error difference between the
// weightings sigma*s + mu and sigma*s' + mu.
IsingProblem build_zoom(const CorrelationCache& cache, std::span<const double> mu, double sigma);

// Keeps the ceil(keep_fraction * nnz) couplings of largest |J|; ties go to the
// lexicographically smallest (i, j). Fields are untouched.
IsingProblem prune(const IsingProblem& p, double keep_fraction);

// h_i -> g_i h_i, J_ij -> g_i g_j J_ij.
IsingProblem apply_gauge(const IsingProblem& p, std::span<const int> gauge);

nlohmann::json to_json(const IsingProblem& p);
IsingProblem ising_from_json(const nlohmann::json& j);

}  // namespace qamlz
