#include "qamlz/weak.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "qamlz/errors.hpp"

namespace qamlz {

RankTransform::RankTransform(std::vector<double> training_values, int orientation)
    : sorted_(std::move(training_values)), orientation_(orientation >= 0 ? 1 : -1) {
  if (sorted_.empty()) throw ArgumentError("rank transform needs training values");
  std::sort(sorted_.begin(), sorted_.end());
  constant_ = sorted_.front() == sorted_.back();
}

double RankTransform::operator()(double v) const {
  if (constant_) return 0.0;
  const auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), v);
  const auto hi = std::upper_bound(lo, sorted_.end(), v);
  const double below = static_cast<double>(lo - sorted_.begin());
  const double equal = static_cast<double>(hi - lo);
  const double cdf = (below + 0.5 * equal) / static_cast<double>(sorted_.size());
  return orientation_ * (2.0 * cdf - 1.0);
}

WeakClassifierBank::WeakClassifierBank(std::vector<RankTransform> transforms,
                                       std::vector<std::string> warnings)
    : transforms_(std::move(transforms)), warnings_(std::move(warnings)) {}

std::vector<double> WeakClassifierBank::evaluate(std::span<const double> x) const {
  if (x.size() != n_features())
    throw DimensionError("expected " + std::to_string(n_features()) + " features, got " +
                         std::to_string(x.size()));
  std::vector<double> h(size());
  for (std::size_t i = 0; i < size(); ++i) h[i] = transforms_[i](x[i]);
  return h;
}

WeakClassifierBank build_bank(const Dataset& train) {
  if (!train.has_both_classes())
    throw ValidationError("weak classifiers need both classes in the training set");

  std::vector<RankTransform> transforms;
  std::vector<std::string> warnings;
  const std::size_t n = train.size();
  for (std::size_t f = 0; f < train.n_features(); ++f) {
    std::vector<double> column(n);
    for (std::size_t r = 0; r < n; ++r) column[r] = train.features()(r, f);
    RankTransform forward(column, 1);
    if (forward.constant()) {
      warnings.push_back("feature " + std::to_string(f) + " is constant; classifier fixed at 0");
      transforms.push_back(std::move(forward));
      continue;
    }
    double corr = 0.0;
    for (std::size_t r = 0; r < n; ++r) corr += forward(column[r]) * train.label(r);
    transforms.emplace_back(std::move(column), corr >= 0.0 ? 1 : -1);
  }
  return WeakClassifierBank(std::move(transforms), std::move(warnings));
}

AugmentedClassifierSet::AugmentedClassifierSet(WeakClassifierBank bank, int offset_bound,
                                               double delta)
    : bank_(std::move(bank)), offset_bound_(offset_bound), delta_(delta) {
  if (offset_bound_ < 0) throw ArgumentError("offset bound A must be >= 0");
  if (!(delta_ > 0.0) || !std::isfinite(delta_)) throw ArgumentError("step size delta must be > 0");
  if (bank_.size() == 0) throw ArgumentError("classifier bank is empty");
}

std::vector<int> AugmentedClassifierSet::signs(std::span<const double> x) const {
  const auto h = bank_.evaluate(x);
  std::vector<int> out(size());
  for (int l = -offset_bound_; l <= offset_bound_; ++l) {
    for (std::size_t i = 0; i < n_base(); ++i) {
      out[index(i, l)] = h[i] + delta_ * l >= 0.0 ? 1 : -1;
    }
  }
  return out;
}

std::vector<double> AugmentedClassifierSet::evaluate(std::span<const double> x) const {
  const auto s = signs(x);
  const double scale = 1.0 / static_cast<double>(size());
  std::vector<double> out(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) out[k] = s[k] * scale;
  return out;
}

Matrix AugmentedClassifierSet::outputs(const Dataset& d) const {
  Matrix m(d.size(), size());
  for (std::size_t r = 0; r < d.size(); ++r) {
    const auto v = evaluate(d.row(r));
    std::copy(v.begin(), v.end(), m.row(r).begin());
  }
  return m;
}

CorrelationCache build_cache(const AugmentedClassifierSet& set, const Dataset& train,
                             CrossTerms mode) {
  const std::size_t n = set.size();
  const std::size_t s_count = train.size();

  // Integer sums first; outputs are +-1/N, so scaling afterwards is exact.
  std::vector<std::int8_t> signs(s_count * n);
  for (std::size_t r = 0; r < s_count; ++r) {
    const auto row = set.signs(train.row(r));
    std::copy(row.begin(), row.end(), signs.begin() + static_cast<std::ptrdiff_t>(r * n));
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  CorrelationCache cache;
  cache.n_examples = s_count;
  cache.linear.assign(n, 0.0);
  cache.quadratic = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    long long acc = 0;
    for (std::size_t r = 0; r < s_count; ++r) acc += signs[r * n + k] * train.label(r);
    cache.linear[k] = static_cast<double>(acc) * inv_n;
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j; k < n; ++k) {
      if (mode == CrossTerms::within_offset && set.offset_of(j) != set.offset_of(k)) continue;
      long long acc = 0;
      for (std::size_t r = 0; r < s_count; ++r) acc += signs[r * n + j] * signs[r * n + k];
      const double v = static_cast<double>(acc) * inv_n * inv_n;
      cache.quadratic(j, k) = v;
      cache.quadratic(k, j) = v;
    }
  }
  return cache;
}

CorrelationCache cache_from_outputs(const Matrix& outputs, std::span<const int> labels) {
  if (outputs.rows() != labels.size())
    throw DimensionError("output rows differ from label count");
  const std::size_t n = outputs.cols();
  CorrelationCache cache;
  cache.n_examples = labels.size();
  cache.linear.assign(n, 0.0);
  cache.quadratic = Matrix(n, n);
  for (std::size_t r = 0; r < outputs.rows(); ++r) {
    const auto row = outputs.row(r);
    for (std::size_t j = 0; j < n; ++j) {
      cache.linear[j] += row[j] * labels[r];
      for (std::size_t k = j; k < n; ++k) cache.quadratic(j, k) += row[j] * row[k];
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) cache.quadratic(k, j) = cache.quadratic(j, k);
  return cache;
}

}  // namespace qamlz
