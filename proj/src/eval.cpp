#include "qamlz/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qamlz/errors.hpp"
#include "qamlz/random.hpp"

namespace qamlz {

StrongClassifier::StrongClassifier(std::vector<double> weights,
                                   std::shared_ptr<const AugmentedClassifierSet> set)
    : weights_(std::move(weights)), set_(std::move(set)) {
  if (!set_) throw ArgumentError("strong classifier needs a classifier set");
  if (weights_.size() != set_->size())
    throw DimensionError("weight count " + std::to_string(weights_.size()) +
                         " differs from classifier count " + std::to_string(set_->size()));
}

double StrongClassifier::score(std::span<const double> x) const {
  const auto c = set_->evaluate(x);
  double r = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) r += weights_[k] * c[k];
  return r;
}

std::vector<double> StrongClassifier::scores(const Dataset& d) const {
  std::vector<double> out(d.size());
  for (std::size_t r = 0; r < d.size(); ++r) out[r] = score(d.row(r));
  return out;
}

std::vector<double> binary_weights(std::span<const int> spins) {
  std::vector<double> w(spins.size());
  for (std::size_t i = 0; i < spins.size(); ++i) w[i] = 0.5 * (spins[i] + 1);
  return w;
}

double trapezoid(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    area += 0.5 * (points[k].efficiency - points[k - 1].efficiency) *
            (points[k].rejection + points[k - 1].rejection);
  }
  return area;
}

RocCurve roc_weighted(std::span<const double> scores, std::span<const int> labels,
                      std::span<const double> weights) {
  if (scores.size() != labels.size() || scores.size() != weights.size())
    throw DimensionError("scores, labels and weights must have equal length");

  double total_sig = 0.0;
  double total_bkg = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (!std::isfinite(scores[k])) throw ValidationError("non-finite score");
    (labels[k] > 0 ? total_sig : total_bkg) += weights[k];
  }
  if (!(total_sig > 0.0 && total_bkg > 0.0))
    throw ValidationError("ROC needs both signal and background examples");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocCurve curve;
  curve.points.push_back({0.0, 1.0});
  double sig = 0.0;
  double bkg = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    const double t = scores[order[k]];
    for (; k < order.size() && scores[order[k]] == t; ++k) {
      const std::size_t idx = order[k];
      (labels[idx] > 0 ? sig : bkg) += weights[idx];
    }
    curve.points.push_back({sig / total_sig, 1.0 - bkg / total_bkg});
  }
  // Guard against rounding in the accumulated weights.
  curve.points.back() = {1.0, 0.0};
  curve.auroc = trapezoid(curve.points);
  return curve;
}

RocCurve roc(std::span<const double> scores, std::span<const int> labels) {
  const std::vector<double> ones(scores.size(), 1.0);
  return roc_weighted(scores, labels, ones);
}

namespace {

// Rejection at efficiency e; `k` is a cursor that only moves forward, so a
// sweep over increasing e costs one pass over the points.
double rejection_from(std::span<const RocPoint> points, double e, std::size_t& k) {
  while (k < points.size() && points[k].efficiency < e) ++k;
  if (k == points.size()) return 0.0;
  if (points[k].efficiency == e) {
    double r = points[k].rejection;
    for (std::size_t m = k + 1; m < points.size() && points[m].efficiency == e; ++m)
      r = std::max(r, points[m].rejection);
    return r;
  }
  if (k == 0) return points[0].rejection;
  const auto& a = points[k - 1];
  const auto& b = points[k];
  return a.rejection + (e - a.efficiency) / (b.efficiency - a.efficiency) * (b.rejection - a.rejection);
}

void accumulate_envelope(std::span<const RocPoint> points, std::vector<double>& env) {
  const std::size_t grid = env.size();
  std::size_t k = 0;
  for (std::size_t g = 0; g < grid; ++g) {
    const double e = static_cast<double>(g) / static_cast<double>(grid - 1);
    env[g] = std::max(env[g], rejection_from(points, e, k));
  }
}

RocCurve curve_from_grid(const std::vector<double>& env) {
  RocCurve out;
  const std::size_t grid = env.size();
  out.points.reserve(grid);
  for (std::size_t g = 0; g < grid; ++g)
    out.points.push_back({static_cast<double>(g) / static_cast<double>(grid - 1), env[g]});
  out.auroc = trapezoid(out.points);
  return out;
}

}  // namespace

double rejection_at(std::span<const RocPoint> points, double efficiency) {
  std::size_t k = 0;
  return rejection_from(points, efficiency, k);
}

RocCurve envelope(std::span<const RocCurve> curves, std::size_t grid) {
  if (curves.empty()) throw ArgumentError("envelope needs at least one curve");
  if (grid < 2) throw ArgumentError("efficiency grid needs at least two points");
  std::vector<double> env(grid, 0.0);
  for (const auto& c : curves) accumulate_envelope(c.points, env);
  return curve_from_grid(env);
}

RocCurve ensemble_roc(std::span<const StrongClassifier> members, const Dataset& test,
                      std::size_t grid) {
  if (members.empty()) throw ArgumentError("ensemble needs at least one member");
  std::vector<RocCurve> curves;
  curves.reserve(members.size());
  for (const auto& m : members) curves.push_back(roc(m.scores(test), test.labels()));
  return envelope(curves, grid);
}

void poisson_weights(std::mt19937_64& rng, std::span<double> out) {
  std::poisson_distribution<int> poisson(1.0);
  for (double& w : out) w = poisson(rng);
}

namespace {

double sample_stddev(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

bool has_both(std::span<const int> labels, std::span<const double> w) {
  double sig = 0.0, bkg = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) (labels[k] > 0 ? sig : bkg) += w[k];
  return sig > 0.0 && bkg > 0.0;
}

// Draws weights until both classes carry weight; bounded to avoid spinning on
// pathological samplers.
void draw_weights(std::mt19937_64& rng, const WeightSampler& sampler, std::span<const int> labels,
                  std::span<double> w) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    sampler(rng, w);
    if (has_both(labels, w)) return;
  }
  throw ValidationError("resampling never produced both classes");
}

}  // namespace

double auroc_error(std::span<const double> scores, std::span<const int> labels,
                   std::size_t resamples, std::uint64_t seed, const WeightSampler& sampler) {
  if (resamples < 2) throw ArgumentError("need at least two resamples");
  std::vector<double> aurocs(resamples);
  std::vector<double> w(scores.size());
  for (std::size_t r = 0; r < resamples; ++r) {
    std::mt19937_64 rng(derive_seed(seed, {r}));
    draw_weights(rng, sampler, labels, w);
    aurocs[r] = roc_weighted(scores, labels, w).auroc;
  }
  return sample_stddev(aurocs);
}

double auroc_error(std::span<const double> scores, std::span<const int> labels,
                   std::size_t resamples, std::uint64_t seed) {
  return auroc_error(scores, labels, resamples, seed, poisson_weights);
}

double ensemble_auroc_error(const std::vector<std::vector<double>>& member_scores,
                            std::span<const int> labels, std::size_t resamples,
                            std::uint64_t seed, std::size_t grid) {
  if (member_scores.empty()) throw ArgumentError("ensemble needs at least one member");
  if (resamples < 2) throw ArgumentError("need at least two resamples");
  std::vector<double> aurocs(resamples);
  std::vector<double> w(labels.size());
  for (std::size_t r = 0; r < resamples; ++r) {
    std::mt19937_64 rng(derive_seed(seed, {r}));
    draw_weights(rng, poisson_weights, labels, w);
    std::vector<double> env(grid, 0.0);
    for (const auto& s : member_scores) accumulate_envelope(roc_weighted(s, labels, w).points, env);
    aurocs[r] = curve_from_grid(env).auroc;
  }
  return sample_stddev(aurocs);
}

StrongClassifier train_qaml(const CorrelationCache& cache,
                            std::shared_ptr<const AugmentedClassifierSet> set, double lambda,
                            const Solver& solver, std::uint64_t seed) {
  if (!(lambda >= 0.0)) throw ArgumentError("lambda must be >= 0");
  const auto result = solver.solve(build_qaml(cache, lambda), seed);
  return StrongClassifier(binary_weights(result.best().spins), std::move(set));
}

double squared_error(const Matrix& outputs, std::span<const int> labels,
                     std::span<const double> weights) {
  if (outputs.rows() != labels.size() || outputs.cols() != weights.size())
    throw DimensionError("squared_error dimensions do not match");
  double total = 0.0;
  for (std::size_t r = 0; r < outputs.rows(); ++r) {
    const auto row = outputs.row(r);
    double pred = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) pred += weights[k] * row[k];
    const double diff = labels[r] - pred;
    total += diff * diff;
  }
  return total;
}

std::vector<double> squared_error_gradient(const CorrelationCache& full_cache,
                                           std::span<const double> weights) {
  const std::size_t n = full_cache.size();
  if (weights.size() != n) throw DimensionError("gradient weight count does not match cache");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = full_cache.quadratic.row(i);
    double qw = 0.0;
    for (std::size_t j = 0; j < n; ++j) qw += row[j] * weights[j];
    g[i] = 2.0 * (qw - full_cache.linear[i]);
  }
  return g;
}

StrongClassifier train_lr(const Dataset& train, std::shared_ptr<const AugmentedClassifierSet> set,
                          const LrOptions& options) {
  if (!set) throw ArgumentError("logistic-regression baseline needs a classifier set");
  if (!(options.learning_rate > 0.0)) throw ArgumentError("learning rate must be > 0");
  const auto cache = build_cache(*set, train, CrossTerms::full);
  const std::size_t n = cache.size();
  const double s_count = static_cast<double>(cache.n_examples);

  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += cache.quadratic(i, i);
  const double curvature = 2.0 * trace / s_count;
  const double step = options.learning_rate / (curvature * s_count);

  std::vector<double> w(n, 0.0);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    const auto g = squared_error_gradient(cache, w);
    for (std::size_t i = 0; i < n; ++i) w[i] -= step * g[i];
    if (!std::all_of(w.begin(), w.end(), [](double v) { return std::isfinite(v); }))
      throw DivergenceError("gradient descent diverged at epoch " + std::to_string(epoch) +
                            "; use a smaller learning rate");
  }
  // Loss up to the constant ||y||^2: w'Qw - 2 C'w.
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double qw = 0.0;
    for (std::size_t j = 0; j < n; ++j) qw += cache.quadratic(i, j) * w[j];
    loss += w[i] * (qw - 2.0 * cache.linear[i]);
  }
  if (!std::isfinite(loss))
    throw DivergenceError("non-finite loss after training; use a smaller learning rate");
  return StrongClassifier(std::move(w), std::move(set));
}

double energy_haug(const CorrelationCache& cache, std::span<const double> mu) {
  const std::size_t n = cache.size();
  if (mu.size() != n) throw DimensionError("weight count does not match cache");
  if (cache.n_examples == 0) throw ArgumentError("cache has no examples");
  double pair = 0.0;
  double lin = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mu[i] == 0.0) continue;
    const auto row = cache.quadratic.row(i);
    double acc = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) acc += mu[j] * row[j];
    pair += mu[i] * acc;
    lin += mu[i] * cache.linear[i];
  }
  return (pair - lin) / static_cast<double>(cache.n_examples);
}

}  // namespace qamlz
