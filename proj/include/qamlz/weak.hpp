#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qamlz/data.hpp"
#include "qamlz/matrix.hpp"

namespace qamlz {

// Empirical-CDF transform of one feature onto [-1, 1]:
//   h(v) = orientation * (2 * F(v) - 1),  F(v) = (#{x < v} + #{x == v} / 2) / S
// over the training values x. Constant features evaluate to 0 everywhere.
class RankTransform {
 public:
  RankTransform() = default;
  RankTransform(std::vector<double> training_values, int orientation);

  double operator()(double v) const;
  int orientation() const noexcept { return orientation_; }
  bool constant() const noexcept { return constant_; }
  const std::vector<double>& sorted_values() const noexcept { return sorted_; }

 private:
  std::vector<double> sorted_;
  int orientation_ = 1;
  bool constant_ = false;
};

// One base weak classifier h_i per raw feature.
class WeakClassifierBank {
 public:
  WeakClassifierBank() = default;
  WeakClassifierBank(std::vector<RankTransform> transforms, std::vector<std::string> warnings);

  std::size_t size() const noexcept { return transforms_.size(); }
  std::size_t n_features() const noexcept { return transforms_.size(); }
  const RankTransform& transform(std::size_t i) const { return transforms_[i]; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  double evaluate(std::size_t i, std::span<const double> x) const { return transforms_[i](x[i]); }
  // Throws DimensionError on a feature-count mismatch.
  std::vector<double> evaluate(std::span<const double> x) const;

 private:
  std::vector<RankTransform> transforms_;
  std::vector<std::string> warnings_;
};

// Needs both classes in `train`. Orientation is chosen so that
// sum_tau h_i(x_tau) y_tau >= 0 on the training set.
WeakClassifierBank build_bank(const Dataset& train);

// Shifted binary classifiers c_il(x) = sgn(h_i(x) + delta*l) / N for
// l = -A..A, with sgn(0) = +1 and N = n_base * (2A + 1).
// Flat index k = (l + A) * n_base + i, so each offset is a contiguous block.
class AugmentedClassifierSet {
 public:
  static constexpr int kDefaultOffsetBound = 3;
  static constexpr double kDefaultDelta = 0.0075;

  AugmentedClassifierSet(WeakClassifierBank bank, int offset_bound = kDefaultOffsetBound,
                         double delta = kDefaultDelta);

  const WeakClassifierBank& bank() const noexcept { return bank_; }
  int offset_bound() const noexcept { return offset_bound_; }
  double delta() const noexcept { return delta_; }
  std::size_t n_base() const noexcept { return bank_.size(); }
  std::size_t n_offsets() const noexcept { return 2 * static_cast<std::size_t>(offset_bound_) + 1; }
  std::size_t size() const noexcept { return n_base() * n_offsets(); }

  std::size_t index(std::size_t base, int offset) const {
    return static_cast<std::size_t>(offset + offset_bound_) * n_base() + base;
  }
  std::size_t base_of(std::size_t k) const { return k % n_base(); }
  int offset_of(std::size_t k) const { return static_cast<int>(k / n_base()) - offset_bound_; }

  // N values in {-1/N, +1/N}.
  std::vector<double> evaluate(std::span<const double> x) const;
  // Same as evaluate() without the 1/N factor, as +-1 integers.
  std::vector<int> signs(std::span<const double> x) const;
  // S x N matrix of classifier outputs over a dataset.
  Matrix outputs(const Dataset& d) const;

 private:
  WeakClassifierBank bank_;
  int offset_bound_;
  double delta_;
};

enum class CrossTerms {
  within_offset,  // C_ijl only couples classifiers sharing the offset l
  full,           // every pair of augmented classifiers is coupled
};

// Correlation sums over the training set:
//   linear[k]       = sum_tau c_k(x_tau) y_tau
//   quadratic(j, k) = sum_tau c_j(x_tau) c_k(x_tau)
struct CorrelationCache {
  std::vector<double> linear;
  Matrix quadratic;
  std::size_t n_examples = 0;

  std::size_t size() const noexcept { return linear.size(); }
};

CorrelationCache build_cache(const AugmentedClassifierSet& set, const Dataset& train,
                             CrossTerms mode = CrossTerms::within_offset);

// Full cache from arbitrary classifier outputs (rows = examples).
CorrelationCache cache_from_outputs(const Matrix& outputs, std::span<const int> labels);

}  // namespace qamlz
