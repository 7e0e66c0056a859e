#include "qamlz/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "qamlz/errors.hpp"

namespace qamlz {

Dataset::Dataset(Matrix features, std::vector<int> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (labels_.empty()) throw ValidationError("dataset has no examples");
  if (features_.cols() == 0) throw ValidationError("dataset has no features");
  if (features_.rows() != labels_.size())
    throw ValidationError("feature rows (" + std::to_string(features_.rows()) +
                          ") differ from label count (" + std::to_string(labels_.size()) + ")");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 1 && labels_[i] != -1)
      throw ValidationError("label at row " + std::to_string(i) + " is not -1 or +1");
  }
  for (double v : features_.data()) {
    if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
  }
}

std::size_t Dataset::count(int label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Matrix f(rows.size(), n_features());
  std::vector<int> y(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto src = row(rows[r]);
    std::copy(src.begin(), src.end(), f.row(r).begin());
    y[r] = labels_[rows[r]];
  }
  return Dataset(std::move(f), std::move(y));
}

std::vector<double> synthetic_direction(std::size_t n_features) {
  std::vector<double> u(n_features);
  double norm = 0.0;
  for (std::size_t k = 0; k < n_features; ++k) {
    u[k] = 1.0 / static_cast<double>(k + 1);
    norm += u[k] * u[k];
  }
  norm = std::sqrt(norm);
  for (double& v : u) v /= norm;
  return u;
}

Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.n_signal < 1 || spec.n_background < 1 || spec.n_features < 1)
    throw ArgumentError("synthetic data needs at least one signal, one background and one feature");
  if (!(spec.separation >= 0.0) || !std::isfinite(spec.separation))
    throw ArgumentError("separation must be a finite value >= 0");

  const auto u = synthetic_direction(spec.n_features);
  const std::size_t total = spec.n_signal + spec.n_background;
  Matrix f(total, spec.n_features);
  std::vector<int> y(total);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t r = 0; r < total; ++r) {
    const int label = r < spec.n_signal ? 1 : -1;
    const double shift = 0.5 * spec.separation * label;
    for (std::size_t k = 0; k < spec.n_features; ++k) f(r, k) = shift * u[k] + normal(rng);
    y[r] = label;
  }
  return Dataset(std::move(f), std::move(y));
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text, std::size_t line) {
  const std::string t = trim(text);
  if (t.empty()) throw ParseError(line, "empty field");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "cannot parse '" + t + "' as a real number");
  }
  if (used != t.size()) throw ParseError(line, "cannot parse '" + t + "' as a real number");
  return v;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());

  std::vector<std::vector<double>> rows;
  std::vector<double> raw_labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_header && line_no == 1) continue;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() < 2) throw ParseError(line_no, "need at least one feature and a label");
    if (width == 0) width = fields.size();
    if (fields.size() != width)
      throw ParseError(line_no, "expected " + std::to_string(width) + " fields, found " +
                                    std::to_string(fields.size()));
    std::vector<double> values(fields.size());
    for (std::size_t k = 0; k < fields.size(); ++k) values[k] = parse_real(fields[k], line_no);
    raw_labels.push_back(values.back());
    values.pop_back();
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ValidationError(path.string() + " contains no examples");

  // {0,1} files are mapped to {-1,+1}; anything else must already be +-1.
  const bool zero_one = std::all_of(raw_labels.begin(), raw_labels.end(),
                                    [](double v) { return v == 0.0 || v == 1.0; });
  Matrix f(rows.size(), width - 1);
  std::vector<int> y(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy(rows[r].begin(), rows[r].end(), f.row(r).begin());
    const double v = raw_labels[r];
    if (zero_one) {
      y[r] = v == 1.0 ? 1 : -1;
    } else if (v == 1.0 || v == -1.0) {
      y[r] = static_cast<int>(v);
    } else {
      std::ostringstream msg;
      msg << "unknown label value " << v << " in row " << r + 1;
      throw ValidationError(msg.str());
    }
  }
  return Dataset(std::move(f), std::move(y));
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17);
  for (std::size_t r = 0; r < d.size(); ++r) {
    for (double v : d.row(r)) out << v << ',';
    out << d.label(r) << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

SplitDataset split_count(const Dataset& d, std::size_t n_train, std::uint64_t seed) {
  const std::size_t total = d.size();
  if (n_train < 1 || n_train >= total)
    throw ArgumentError("split needs at least one train and one test example (train " +
                        std::to_string(n_train) + " of " + std::to_string(total) + ")");

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  if (d.has_both_classes() && n_train >= 2) {
    for (int cls : {1, -1}) {
      const bool present = std::any_of(order.begin(), order.begin() + n_train,
                                       [&](std::size_t i) { return d.label(i) == cls; });
      if (present) continue;
      auto it = std::find_if(order.begin() + n_train, order.end(),
                             [&](std::size_t i) { return d.label(i) == cls; });
      std::iter_swap(order.begin() + (n_train - 1), it);
    }
  }

  std::span<const std::size_t> all(order);
  return SplitDataset{d.subset(all.first(n_train)), d.subset(all.subspan(n_train)), seed};
}

SplitDataset split(const Dataset& d, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ArgumentError("train fraction must lie in (0, 1)");
  const auto n_train =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(d.size())));
  return split_count(d, n_train, seed);
}

}  // namespace qamlz
