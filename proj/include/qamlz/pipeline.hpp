#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qamlz/anneal.hpp"
#include "qamlz/data.hpp"
#include "qamlz/eval.hpp"
#include "qamlz/zoom.hpp"

namespace qamlz {

inline constexpr int kSchemaVersion = 1;
const char* version();

// qaml-z: zoom with the configured solver and excited-state ensembling
// sa-z:   zoom with simulated annealing, best state only
// sae-z:  zoom with the long simulated-annealing schedule and excited states
// qaml:   single anneal of the binary on/off Hamiltonian
// lr:     least-squares weights by gradient descent
const std::vector<std::string>& known_methods();
bool is_zoom_method(const std::string& method);

struct DataConfig {
  std::optional<std::filesystem::path> csv;
  bool header = false;
  SyntheticSpec synthetic;
};

struct SolverConfig {
  std::string kind = "sa";  // sa | exact
  SaSchedule schedule{0.1, 5.0, 1000, 1000, true};
  SaSchedule long_schedule{0.1, 5.0, 5000, 5000, true};
};

struct RunConfig {
  std::uint64_t seed = 0;
  DataConfig data;
  double train_fraction = 0.5;
  int offset_bound = AugmentedClassifierSet::kDefaultOffsetBound;
  double delta = AugmentedClassifierSet::kDefaultDelta;
  bool full_cross_terms = false;
  ZoomConfig zoom;
  SolverConfig solver;
  double lambda = 0.0;
  bool qaml_augmented = false;
  LrOptions lr;
  std::size_t resamples = kDefaultResamples;
  std::size_t grid = kDefaultGrid;
  std::vector<std::string> methods{"qaml-z"};
  std::filesystem::path output = "run";

  // Throws ArgumentError on any invalid field or unknown method.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

Dataset load_data(const RunConfig& c);

// Strong-classifier quality at one zoom iteration (main path).
struct TraceRow {
  IterationRecord record;
  double test_energy = 0.0;
  double train_auroc = 0.0;
  double test_auroc = 0.0;
};

struct MethodOutcome {
  std::string method;
  std::vector<StrongClassifier> members;
  RocCurve train_roc;
  RocCurve test_roc;
  std::vector<TraceRow> trace;
  double seconds = 0.0;
};

// Trains and evaluates one method on a split. `seed` drives every random
// choice of the method; the same (split, config, seed) gives the same outcome.
MethodOutcome run_method(const std::string& method, const SplitDataset& split,
                         const RunConfig& config, std::uint64_t seed);

std::uint64_t method_seed(std::uint64_t master, const std::string& method);

// Runs every configured method on one seeded split, writes
// <output>/artifact.json and <output>/roc_<method>.csv, returns the artifact.
nlohmann::json run_train(const RunConfig& config);

struct SweepCell {
  std::size_t size = 0;
  std::size_t replicate = 0;
  std::string method;
  double auroc = 0.0;
  double auroc_error = 0.0;
  std::string error;  // non-empty when the cell failed
};

struct SweepSummaryRow {
  std::size_t size = 0;
  std::string method;
  std::size_t replicates = 0;
  double mean_auroc = 0.0;
  // sqrt(across-replicate variance + mean squared per-cell error)
  double error = 0.0;
};

struct SweepOptions {
  std::vector<std::size_t> sizes;
  std::size_t replicates = 1;
  std::size_t jobs = 1;
};

std::vector<SweepCell> run_sweep(const RunConfig& config, const SweepOptions& options);
std::vector<SweepSummaryRow> summarize(const std::vector<SweepCell>& cells);
// Writes results.csv, summary.csv and (if any cell failed) failures.csv.
void write_sweep(const std::vector<SweepCell>& cells, const std::filesystem::path& dir);

// Writes via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string roc_csv(const RocCurve& curve);
std::string format_real(double v);

}  // namespace qamlz
