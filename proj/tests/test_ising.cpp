#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "qamlz/errors.hpp"
#include "qamlz/ising.hpp"
#include "test_helpers.hpp"

namespace qamlz {
namespace {

using testing::brute_spectrum;
using testing::random_instance;
using testing::random_problem;
using testing::random_spins;
using testing::spins_from_mask;

TEST(Energy, SmallExample) {
  const IsingProblem p({1.0, -1.0}, {{0, 1, 0.5}});
  EXPECT_DOUBLE_EQ(energy_of(p, std::vector<int>{1, 1}), 0.5);
}

TEST(Energy, ZeroProblem) {
  const IsingProblem p(std::vector<double>(5, 0.0), {});
  std::mt19937_64 rng(1);
  EXPECT_EQ(energy_of(p, random_spins(5, rng)), 0.0);
}

TEST(Energy, MatchesDenseDoubleLoop) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_problem(6, rng, 0.6);
    const auto spectrum = brute_spectrum(p);
    for (std::uint64_t mask = 0; mask < spectrum.size(); ++mask)
      EXPECT_NEAR(energy_of(p, spins_from_mask(mask, 6)), spectrum[mask], 1e-12);
  }
}

TEST(Energy, RejectsBadSpins) {
  const IsingProblem p({0.0, 0.0}, {});
  EXPECT_THROW(energy_of(p, std::vector<int>{1}), DimensionError);
  EXPECT_THROW(energy_of(p, std::vector<int>{1, 0}), ArgumentError);
}

TEST(Problem, RejectsMalformedCouplings) {
  EXPECT_THROW(IsingProblem({0, 0}, {{1, 0, 1.0}}), ArgumentError);
  EXPECT_THROW(IsingProblem({0, 0}, {{0, 0, 1.0}}), ArgumentError);
  EXPECT_THROW(IsingProblem({0, 0}, {{0, 2, 1.0}}), ArgumentError);
  EXPECT_THROW(IsingProblem({0, 0}, {{0, 1, 1.0}, {0, 1, 2.0}}), ArgumentError);
  EXPECT_THROW(IsingProblem({std::numeric_limits<double>::infinity()}, {}), ArgumentError);
}

TEST(Problem, JsonRoundTrip) {
  std::mt19937_64 rng(3);
  const auto p = random_problem(7, rng, 0.5);
  EXPECT_EQ(ising_from_json(to_json(p)), p);
}

CorrelationCache two_classifier_cache() {
  CorrelationCache c;
  c.linear = {0.3, -0.2};
  c.quadratic = Matrix(2, 2);
  c.quadratic(0, 0) = 0.5;
  c.quadratic(1, 1) = 0.4;
  c.quadratic(0, 1) = c.quadratic(1, 0) = 0.1;
  c.n_examples = 4;
  return c;
}

// Hand expansion of the baseline Hamiltonian for two classifiers.
TEST(Qaml, TwoClassifierHandExpansion) {
  const auto cache = two_classifier_cache();
  const double lambda = 0.05;
  const auto p = build_qaml(cache, lambda);
  for (std::uint64_t mask = 0; mask < 4; ++mask) {
    const auto s = spins_from_mask(mask, 2);
    const double expected = (lambda - 0.3 + 0.5 * 0.1) * s[0] + (lambda + 0.2) * s[1] +
                            0.25 * 0.1 * s[0] * s[1];
    EXPECT_NEAR(energy_of(p, s), expected, 1e-15);
  }
}

TEST(Qaml, DecoupledFieldsAndLinearLambda) {
  CorrelationCache c;
  c.linear = {1.0, 2.0, 3.0};
  c.quadratic = Matrix(3, 3);
  c.n_examples = 1;
  const auto p = build_qaml(c, 0.0);
  EXPECT_EQ(p.fields(), (std::vector<double>{-1.0, -2.0, -3.0}));
  EXPECT_EQ(p.nonzero_couplings(), 0u);
  const auto q = build_qaml(c, 0.7);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(q.fields()[i] - p.fields()[i], 0.7, 1e-15);
}

TEST(Zoom, UnitBreadthAtOrigin) {
  const auto cache = two_classifier_cache();
  const auto p = build_zoom(cache, std::vector<double>{0.0, 0.0}, 1.0);
  EXPECT_EQ(p.fields(), (std::vector<double>{-0.3, 0.2}));
  ASSERT_EQ(p.couplings().size(), 1u);
  EXPECT_DOUBLE_EQ(p.couplings()[0].value, 0.1);
  const auto half = build_zoom(cache, std::vector<double>{0.0, 0.0}, 0.5);
  EXPECT_DOUBLE_EQ(half.fields()[0], -0.15);
  EXPECT_DOUBLE_EQ(half.couplings()[0].value, 0.025);
}

// Energy differences are half the squared-error differences of the
// corresponding weightings.
TEST(Zoom, EnergyDifferenceIsHalfSquaredErrorDifference) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    const auto inst = random_instance(30, n, rng);
    const auto cache = cache_from_outputs(inst.outputs, inst.labels);
    std::vector<double> mu(n);
    for (auto& v : mu) v = u(rng);
    const double sigma = std::ldexp(1.0, -static_cast<int>(rng() % 5));
    const auto p = build_zoom(cache, mu, sigma);
    const auto s = random_spins(n, rng);
    const auto t = random_spins(n, rng);
    auto weights = [&](const Spins& spins) {
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i) w[i] = sigma * spins[i] + mu[i];
      return w;
    };
    const double lhs = energy_of(p, s) - energy_of(p, t);
    const double rhs = 0.5 * (testing::direct_mse(inst, weights(s)) -
                              testing::direct_mse(inst, weights(t)));
    EXPECT_NEAR(lhs, rhs, 1e-9);
  }
}

TEST(Prune, KeepsLargestCouplings) {
  std::vector<Coupling> j;
  std::mt19937_64 rng(5);
  std::vector<double> mags(40);
  for (std::size_t k = 0; k < 40; ++k) mags[k] = 0.1 + 0.01 * static_cast<double>(k);
  std::shuffle(mags.begin(), mags.end(), rng);
  for (std::size_t k = 0; k < 40; ++k) j.push_back({k, k + 1, (k % 2 ? -1 : 1) * mags[k]});
  const IsingProblem p(std::vector<double>(41, 0.25), j);
  const auto q = prune(p, 0.05);
  ASSERT_EQ(q.couplings().size(), 2u);
  for (const auto& c : q.couplings()) EXPECT_GE(std::abs(c.value), 0.1 + 0.01 * 38 - 1e-12);
  EXPECT_EQ(q.fields(), p.fields());
  EXPECT_EQ(prune(p, 1.0), p);
}

TEST(Prune, CeilingOfFraction) {
  const IsingProblem p({0, 0, 0, 0}, {{0, 1, 3.0}, {1, 2, -5.0}, {2, 3, 1.0}});
  // ceil(0.34 * 3) = 2
  const auto two = prune(p, 0.34);
  ASSERT_EQ(two.couplings().size(), 2u);
  EXPECT_EQ(two.couplings()[0], (Coupling{0, 1, 3.0}));
  EXPECT_EQ(two.couplings()[1], (Coupling{1, 2, -5.0}));
  // ceil(0.33 * 3) = 1
  const auto one = prune(p, 0.33);
  ASSERT_EQ(one.couplings().size(), 1u);
  EXPECT_EQ(one.couplings()[0], (Coupling{1, 2, -5.0}));
}

TEST(Prune, TiesGoToLexicographicOrder) {
  const IsingProblem p({0, 0, 0}, {{1, 2, 1.0}, {0, 2, -1.0}, {0, 1, 1.0}});
  const auto q = prune(p, 0.5);
  ASSERT_EQ(q.couplings().size(), 2u);
  EXPECT_EQ(q.couplings()[0].j, 1u);
  EXPECT_EQ(q.couplings()[1].j, 2u);
  EXPECT_EQ(q.couplings()[1].i, 0u);
}

TEST(Prune, MonotoneInFraction) {
  std::mt19937_64 rng(6);
  const auto p = random_problem(12, rng, 0.7);
  std::size_t prev = 0;
  for (double f = 0.05; f <= 1.0; f += 0.05) {
    const auto n = prune(p, f).couplings().size();
    EXPECT_GE(n, prev);
    prev = n;
  }
  EXPECT_THROW(prune(p, 0.0), ArgumentError);
  EXPECT_THROW(prune(p, 1.5), ArgumentError);
}

TEST(Gauge, IdentityAndInvolution) {
  std::mt19937_64 rng(7);
  const auto p = random_problem(8, rng);
  EXPECT_EQ(apply_gauge(p, std::vector<int>(8, 1)), p);
  const auto g = random_spins(8, rng);
  EXPECT_EQ(apply_gauge(apply_gauge(p, g), g), p);
}

TEST(Gauge, EnergyAndSpectrumInvariance) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    const auto p = random_problem(n, rng, 0.5);
    const auto g = random_spins(n, rng);
    const auto q = apply_gauge(p, g);
    const auto s = random_spins(n, rng);
    Spins gs(n);
    for (std::size_t i = 0; i < n; ++i) gs[i] = g[i] * s[i];
    EXPECT_NEAR(energy_of(q, gs), energy_of(p, s), 1e-12);
    auto a = brute_spectrum(p);
    auto b = brute_spectrum(q);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
  }
}

}  // namespace
}  // namespace qamlz
