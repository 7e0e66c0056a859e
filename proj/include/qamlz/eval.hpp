#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "qamlz/anneal.hpp"
#include "qamlz/data.hpp"
#include "qamlz/weak.hpp"

namespace qamlz {

// R(x) = sum_k w_k c_k(x) over a classifier set.
class StrongClassifier {
 public:
  StrongClassifier(std::vector<double> weights, std::shared_ptr<const AugmentedClassifierSet> set);

  const std::vector<double>& weights() const noexcept { return weights_; }
  const AugmentedClassifierSet& classifier_set() const { return *set_; }
  std::shared_ptr<const AugmentedClassifierSet> shared_set() const { return set_; }

  double score(std::span<const double> x) const;
  std::vector<double> scores(const Dataset& d) const;

 private:
  std::vector<double> weights_;
  std::shared_ptr<const AugmentedClassifierSet> set_;
};

// QAML weights (s + 1) / 2 from spins.
std::vector<double> binary_weights(std::span<const int> spins);

struct RocPoint {
  double efficiency = 0.0;  // true-positive rate on y = +1
  double rejection = 0.0;   // true-negative rate on y = -1
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auroc = 0.0;
  double auroc_error = 0.0;
};

// Trapezoidal area under rejection-vs-efficiency.
double trapezoid(std::span<const RocPoint> points);

// Thresholds at each distinct score (score >= t is called signal), from
// (0, 1) to (1, 0). Throws ValidationError unless both classes are present.
RocCurve roc(std::span<const double> scores, std::span<const int> labels);
// Same with per-example weights (zero weights allowed).
RocCurve roc_weighted(std::span<const double> scores, std::span<const int> labels,
                      std::span<const double> weights);

inline constexpr std::size_t kDefaultGrid = 1001;

// Rejection of a curve at a given efficiency, linear between points and the
// largest value where the curve is vertical.
double rejection_at(std::span<const RocPoint> points, double efficiency);

// Pointwise maximum of rejection over a uniform efficiency grid.
RocCurve envelope(std::span<const RocCurve> curves, std::size_t grid = kDefaultGrid);
RocCurve ensemble_roc(std::span<const StrongClassifier> members, const Dataset& test,
                      std::size_t grid = kDefaultGrid);

// Fills one resample's per-example weights.
using WeightSampler = std::function<void(std::mt19937_64&, std::span<double>)>;
void poisson_weights(std::mt19937_64& rng, std::span<double> out);

inline constexpr std::size_t kDefaultResamples = 100;

// Standard deviation of AUROC over resamples with independent Poisson(1)
// weights per example. Resample r draws from derive_seed(seed, {r}).
double auroc_error(std::span<const double> scores, std::span<const int> labels,
                   std::size_t resamples, std::uint64_t seed);
double auroc_error(std::span<const double> scores, std::span<const int> labels,
                   std::size_t resamples, std::uint64_t seed, const WeightSampler& sampler);
// Same for a supremum ensemble: each resample rebuilds the envelope.
double ensemble_auroc_error(const std::vector<std::vector<double>>& member_scores,
                            std::span<const int> labels, std::size_t resamples,
                            std::uint64_t seed, std::size_t grid = kDefaultGrid);

// One anneal of build_qaml(cache, lambda); weights (s + 1) / 2.
StrongClassifier train_qaml(const CorrelationCache& cache,
                            std::shared_ptr<const AugmentedClassifierSet> set, double lambda,
                            const Solver& solver, std::uint64_t seed);

// Sum over examples of (y - sum_k w_k c_k)^2, evaluated directly.
double squared_error(const Matrix& outputs, std::span<const int> labels,
                     std::span<const double> weights);
// Gradient of squared_error from a full cache: 2 (Q w - C).
std::vector<double> squared_error_gradient(const CorrelationCache& full_cache,
                                           std::span<const double> weights);

struct LrOptions {
  std::size_t epochs = 2000;
  // Step is learning_rate / L with L = 2 trace(Q) / S, an upper bound on the
  // curvature of the per-example loss; values below 2 cannot diverge.
  double learning_rate = 1.0;
};

// Full-batch gradient descent on the squared error from zero weights.
// Throws DivergenceError if the loss stops being finite.
StrongClassifier train_lr(const Dataset& train, std::shared_ptr<const AugmentedClassifierSet> set,
                          const LrOptions& options = {});

// (1/S) [ sum_{i<j} mu_i mu_j C_ij - sum_i mu_i C_i ]
double energy_haug(const CorrelationCache& cache, std::span<const double> mu);

}  // namespace qamlz
