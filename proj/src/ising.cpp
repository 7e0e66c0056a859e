#include "qamlz/ising.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qamlz/errors.hpp"

namespace qamlz {

IsingProblem::IsingProblem(std::vector<double> fields, std::vector<Coupling> couplings)
    : fields_(std::move(fields)), couplings_(std::move(couplings)) {
  for (double h : fields_)
    if (!std::isfinite(h)) throw ArgumentError("non-finite local field");
  for (const auto& c : couplings_) {
    if (c.i >= c.j) throw ArgumentError("couplings must satisfy i < j");
    if (c.j >= fields_.size()) throw ArgumentError("coupling index out of range");
    if (!std::isfinite(c.value)) throw ArgumentError("non-finite coupling");
  }
  std::sort(couplings_.begin(), couplings_.end(), [](const Coupling& a, const Coupling& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (std::size_t k = 1; k < couplings_.size(); ++k) {
    if (couplings_[k].i == couplings_[k - 1].i && couplings_[k].j == couplings_[k - 1].j)
      throw ArgumentError("duplicate coupling (" + std::to_string(couplings_[k].i) + ", " +
                          std::to_string(couplings_[k].j) + ")");
  }
}

std::size_t IsingProblem::nonzero_couplings() const {
  return static_cast<std::size_t>(std::count_if(couplings_.begin(), couplings_.end(),
                                                [](const Coupling& c) { return c.value != 0.0; }));
}

double IsingProblem::max_magnitude() const {
  double m = 0.0;
  for (double h : fields_) m = std::max(m, std::abs(h));
  for (const auto& c : couplings_) m = std::max(m, std::abs(c.value));
  return m;
}

void check_spins(const IsingProblem& p, std::span<const int> s) {
  if (s.size() != p.size())
    throw DimensionError("spin vector has " + std::to_string(s.size()) + " entries, problem has " +
                         std::to_string(p.size()));
  for (int v : s)
    if (v != 1 && v != -1) throw ArgumentError("spins must be -1 or +1");
}

double energy_of(const IsingProblem& p, std::span<const int> s) {
  check_spins(p, s);
  double e = 0.0;
  const auto& h = p.fields();
  for (std::size_t i = 0; i < h.size(); ++i) e += h[i] * s[i];
  for (const auto& c : p.couplings()) e += c.value * s[c.i] * s[c.j];
  return e;
}

IsingProblem build_qaml(const CorrelationCache& cache, double lambda) {
  const std::size_t n = cache.size();
  std::vector<double> h(n);
  std::vector<Coupling> couplings;
  for (std::size_t i = 0; i < n; ++i) {
    double upper = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = cache.quadratic(i, j);
      upper += c;
      if (c != 0.0) couplings.push_back({i, j, 0.25 * c});
    }
    h[i] = lambda - cache.linear[i] + 0.5 * upper;
  }
  return IsingProblem(std::move(h), std::move(couplings));
}

IsingProblem build_zoom(const CorrelationCache& cache, std::span<const double> mu, double sigma) {
  const std::size_t n = cache.size();
  if (mu.size() != n)
    throw DimensionError("weight vector has " + std::to_string(mu.size()) + " entries, cache has " +
                         std::to_string(n));
  if (!(sigma > 0.0)) throw ArgumentError("search breadth sigma must be > 0");

  const double sigma2 = sigma * sigma;
  std::vector<double> h(n);
  std::vector<Coupling> couplings;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = cache.quadratic.row(i);
    double pull = 0.0;
    for (std::size_t j = 0; j < n; ++j) pull += mu[j] * row[j];
    h[i] = sigma * (pull - cache.linear[i]);
    for (std::size_t j = i + 1; j < n; ++j)
      if (row[j] != 0.0) couplings.push_back({i, j, sigma2 * row[j]});
  }
  return IsingProblem(std::move(h), std::move(couplings));
}

IsingProblem prune(const IsingProblem& p, double keep_fraction) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
    throw ArgumentError("keep fraction must lie in (0, 1]");

  std::vector<std::size_t> nonzero;
  const auto& all = p.couplings();
  for (std::size_t k = 0; k < all.size(); ++k)
    if (all[k].value != 0.0) nonzero.push_back(k);

  // 1e-9 absorbs representation error in products like 0.05 * 40.
  const double target = std::ceil(keep_fraction * static_cast<double>(nonzero.size()) - 1e-9);
  const auto keep = std::min(nonzero.size(), static_cast<std::size_t>(std::max(0.0, target)));

  // Couplings are sorted by (i, j), so a stable sort on |J| breaks ties lexicographically.
  std::stable_sort(nonzero.begin(), nonzero.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(all[a].value) > std::abs(all[b].value);
  });
  std::vector<Coupling> kept;
  kept.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r) kept.push_back(all[nonzero[r]]);
  return IsingProblem(p.fields(), std::move(kept));
}

IsingProblem apply_gauge(const IsingProblem& p, std::span<const int> gauge) {
  check_spins(p, gauge);
  std::vector<double> h(p.fields());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] *= gauge[i];
  std::vector<Coupling> couplings(p.couplings());
  for (auto& c : couplings) c.value *= gauge[c.i] * gauge[c.j];
  return IsingProblem(std::move(h), std::move(couplings));
}

nlohmann::json to_json(const IsingProblem& p) {
  nlohmann::json j;
  j["n"] = p.size();
  j["h"] = p.fields();
  auto terms = nlohmann::json::array();
  for (const auto& c : p.couplings()) terms.push_back({c.i, c.j, c.value});
  j["j"] = std::move(terms);
  return j;
}

IsingProblem ising_from_json(const nlohmann::json& j) {
  const auto n = j.at("n").get<std::size_t>();
  auto h = j.at("h").get<std::vector<double>>();
  if (h.size() != n) throw ValidationError("field count does not match n");
  std::vector<Coupling> couplings;
  for (const auto& t : j.at("j")) {
    if (!t.is_array() || t.size() != 3) throw ValidationError("coupling entries are [i, j, value]");
    couplings.push_back({t[0].get<std::size_t>(), t[1].get<std::size_t>(), t[2].get<double>()});
  }
  return IsingProblem(std::move(h), std::move(couplings));
}

}  // namespace qamlz
