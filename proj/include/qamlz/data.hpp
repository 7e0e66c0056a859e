#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qamlz/matrix.hpp"

namespace qamlz {

// Labeled examples: one feature row per example, labels in {-1, +1}.
class Dataset {
 public:
  Dataset() = default;
  // Throws ValidationError unless S >= 1, F >= 1, all features finite and
  // every label is exactly -1 or +1.
  Dataset(Matrix features, std::vector<int> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t n_features() const noexcept { return features_.cols(); }
  const Matrix& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  std::span<const double> row(std::size_t i) const { return features_.row(i); }
  int label(std::size_t i) const { return labels_[i]; }

  std::size_t count(int label) const;
  bool has_both_classes() const { return count(+1) > 0 && count(-1) > 0; }

  // Rows in the given order.
  Dataset subset(std::span<const std::size_t> rows) const;

  bool operator==(const Dataset&) const = default;

 private:
  Matrix features_;
  std::vector<int> labels_;
};

struct SplitDataset {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
};

struct SyntheticSpec {
  std::size_t n_signal = 1000;
  std::size_t n_background = 1000;
  std::size_t n_features = 8;
  double separation = 2.0;
};

// Unit direction along which the two synthetic classes are separated.
// Components decay as 1/(k+1) so features differ in strength.
std::vector<double> synthetic_direction(std::size_t n_features);

// Two unit-covariance Gaussians with means +-separation/2 along
// synthetic_direction(). Signal rows (label +1) come first.
Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

// Last column is the label, {-1,+1} or {0,1}. Row order is preserved.
Dataset load_csv(const std::filesystem::path& path, bool skip_header = false);
void write_csv(const Dataset& d, const std::filesystem::path& path);

// Seeded uniform permutation; the first round(fraction*S) rows form train.
// If the source has both classes, train is repaired to contain both.
SplitDataset split(const Dataset& d, double train_fraction, std::uint64_t seed);
SplitDataset split_count(const Dataset& d, std::size_t n_train, std::uint64_t seed);

}  // namespace qamlz
