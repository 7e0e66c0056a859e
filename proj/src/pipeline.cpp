#include "qamlz/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "qamlz/errors.hpp"
#include "qamlz/random.hpp"

namespace qamlz {

using nlohmann::json;

const char* version() { return QAMLZ_VERSION; }

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> methods{"qaml-z", "sa-z", "sae-z", "qaml", "lr"};
  return methods;
}

bool is_zoom_method(const std::string& method) {
  return method == "qaml-z" || method == "sa-z" || method == "sae-z";
}

void RunConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ArgumentError("train_fraction must lie in (0, 1)");
  if (offset_bound < 0) throw ArgumentError("offset_bound must be >= 0");
  if (!(delta > 0.0)) throw ArgumentError("delta must be > 0");
  zoom.validate();
  if (solver.kind != "sa" && solver.kind != "exact")
    throw ArgumentError("solver kind must be 'sa' or 'exact', got '" + solver.kind + "'");
  solver.schedule.validate();
  solver.long_schedule.validate();
  if (!(lambda >= 0.0)) throw ArgumentError("lambda must be >= 0");
  if (!(lr.learning_rate > 0.0)) throw ArgumentError("learning_rate must be > 0");
  if (resamples < 2) throw ArgumentError("resamples must be >= 2");
  if (grid < 2) throw ArgumentError("grid must be >= 2");
  if (methods.empty()) throw ArgumentError("no methods selected");
  for (const auto& m : methods) {
    if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
      throw ArgumentError("unknown method '" + m + "'");
  }
  if (!data.csv) {
    const auto& s = data.synthetic;
    if (s.n_signal < 1 || s.n_background < 1 || s.n_features < 1)
      throw ArgumentError("synthetic data needs positive counts");
    if (!(s.separation >= 0.0)) throw ArgumentError("separation must be >= 0");
  }
}

namespace {

json schedule_json(const SaSchedule& s) {
  return {{"beta_initial", s.beta_initial},
          {"beta_final", s.beta_final},
          {"sweeps", s.sweeps},
          {"reads", s.reads},
          {"auto_scale", s.auto_scale}};
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ArgumentError(where + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ArgumentError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

SaSchedule schedule_from(const json& j, SaSchedule s, const std::string& where) {
  check_keys(j, {"beta_initial", "beta_final", "sweeps", "reads", "auto_scale"}, where);
  read(j, "beta_initial", s.beta_initial);
  read(j, "beta_final", s.beta_final);
  read(j, "sweeps", s.sweeps);
  read(j, "reads", s.reads);
  read(j, "auto_scale", s.auto_scale);
  return s;
}

}  // namespace

json to_json(const RunConfig& c) {
  json data;
  if (c.data.csv) {
    data = {{"source", "csv"}, {"path", c.data.csv->string()}, {"header", c.data.header}};
  } else {
    data = {{"source", "synthetic"},
            {"signal", c.data.synthetic.n_signal},
            {"background", c.data.synthetic.n_background},
            {"features", c.data.synthetic.n_features},
            {"separation", c.data.synthetic.separation}};
  }
  return {
      {"schema", kSchemaVersion},
      {"seed", c.seed},
      {"data", data},
      {"split", {{"train_fraction", c.train_fraction}}},
      {"augment",
       {{"offset_bound", c.offset_bound}, {"delta", c.delta}, {"full_cross_terms", c.full_cross_terms}}},
      {"zoom",
       {{"b", c.zoom.b},
        {"iterations", c.zoom.iterations},
        {"p_f", c.zoom.p_flip},
        {"q_f", c.zoom.q_flip},
        {"d", c.zoom.excited_distance},
        {"n_e", c.zoom.excited_max},
        {"keep_fraction", c.zoom.keep_fraction},
        {"gauges", c.zoom.gauges}}},
      {"solver",
       {{"kind", c.solver.kind},
        {"schedule", schedule_json(c.solver.schedule)},
        {"long_schedule", schedule_json(c.solver.long_schedule)}}},
      {"qaml", {{"lambda", c.lambda}, {"augmented", c.qaml_augmented}}},
      {"lr", {{"epochs", c.lr.epochs}, {"learning_rate", c.lr.learning_rate}}},
      {"eval", {{"resamples", c.resamples}, {"grid", c.grid}}},
      {"methods", c.methods},
      {"output", c.output.string()},
  };
}

RunConfig run_config_from_json(const json& j) {
  check_keys(j, {"schema", "seed", "data", "split", "augment", "zoom", "solver", "qaml", "lr", "eval",
                 "methods", "output"},
             "config");
  if (j.contains("schema") && j.at("schema").get<int>() != kSchemaVersion)
    throw ArgumentError("unsupported config schema " + j.at("schema").dump());

  RunConfig c;
  read(j, "seed", c.seed);
  if (j.contains("data")) {
    const auto& d = j.at("data");
    check_keys(d, {"source", "path", "header", "signal", "background", "features", "separation"},
               "data");
    const std::string source = d.value("source", d.contains("path") ? "csv" : "synthetic");
    if (source == "csv") {
      c.data.csv = d.at("path").get<std::string>();
      read(d, "header", c.data.header);
    } else if (source == "synthetic") {
      read(d, "signal", c.data.synthetic.n_signal);
      read(d, "background", c.data.synthetic.n_background);
      read(d, "features", c.data.synthetic.n_features);
      read(d, "separation", c.data.synthetic.separation);
    } else {
      throw ArgumentError("data source must be 'csv' or 'synthetic'");
    }
  }
  if (j.contains("split")) {
    check_keys(j.at("split"), {"train_fraction"}, "split");
    read(j.at("split"), "train_fraction", c.train_fraction);
  }
  if (j.contains("augment")) {
    const auto& a = j.at("augment");
    check_keys(a, {"offset_bound", "delta", "full_cross_terms"}, "augment");
    read(a, "offset_bound", c.offset_bound);
    read(a, "delta", c.delta);
    read(a, "full_cross_terms", c.full_cross_terms);
  }
  if (j.contains("zoom")) {
    const auto& z = j.at("zoom");
    check_keys(z, {"b", "iterations", "p_f", "q_f", "d", "n_e", "keep_fraction", "gauges"}, "zoom");
    read(z, "b", c.zoom.b);
    read(z, "iterations", c.zoom.iterations);
    read(z, "p_f", c.zoom.p_flip);
    read(z, "q_f", c.zoom.q_flip);
    read(z, "d", c.zoom.excited_distance);
    read(z, "n_e", c.zoom.excited_max);
    read(z, "keep_fraction", c.zoom.keep_fraction);
    read(z, "gauges", c.zoom.gauges);
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    check_keys(s, {"kind", "schedule", "long_schedule"}, "solver");
    read(s, "kind", c.solver.kind);
    if (s.contains("schedule"))
      c.solver.schedule = schedule_from(s.at("schedule"), c.solver.schedule, "solver.schedule");
    if (s.contains("long_schedule"))
      c.solver.long_schedule =
          schedule_from(s.at("long_schedule"), c.solver.long_schedule, "solver.long_schedule");
  }
  if (j.contains("qaml")) {
    check_keys(j.at("qaml"), {"lambda", "augmented"}, "qaml");
    read(j.at("qaml"), "lambda", c.lambda);
    read(j.at("qaml"), "augmented", c.qaml_augmented);
  }
  if (j.contains("lr")) {
    check_keys(j.at("lr"), {"epochs", "learning_rate"}, "lr");
    read(j.at("lr"), "epochs", c.lr.epochs);
    read(j.at("lr"), "learning_rate", c.lr.learning_rate);
  }
  if (j.contains("eval")) {
    check_keys(j.at("eval"), {"resamples", "grid"}, "eval");
    read(j.at("eval"), "resamples", c.resamples);
    read(j.at("eval"), "grid", c.grid);
  }
  read(j, "methods", c.methods);
  if (j.contains("output")) c.output = j.at("output").get<std::string>();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("config " + path.string() + " is not valid JSON: " + e.what());
  }
  try {
    return run_config_from_json(j);
  } catch (const json::exception& e) {
    throw ArgumentError("config " + path.string() + ": " + e.what());
  }
}

Dataset load_data(const RunConfig& c) {
  if (c.data.csv) return load_csv(*c.data.csv, c.data.header);
  return generate_synthetic(c.data.synthetic, derive_seed(c.seed, {0}));
}

std::uint64_t method_seed(std::uint64_t master, const std::string& method) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : method) h = (h ^ ch) * 0x100000001b3ULL;
  return derive_seed(master, {h});
}

namespace {

std::vector<double> scores_from_outputs(const Matrix& outputs, std::span<const double> w) {
  std::vector<double> s(outputs.rows());
  for (std::size_t r = 0; r < outputs.rows(); ++r) {
    const auto row = outputs.row(r);
    double acc = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) acc += w[k] * row[k];
    s[r] = acc;
  }
  return s;
}

RocCurve evaluate_members(const std::vector<StrongClassifier>& members, const Dataset& d,
                          const RunConfig& config, std::uint64_t seed) {
  std::vector<std::vector<double>> scores;
  scores.reserve(members.size());
  const Matrix outputs = members.front().classifier_set().outputs(d);
  for (const auto& m : members) scores.push_back(scores_from_outputs(outputs, m.weights()));
  if (members.size() == 1) {
    RocCurve curve = roc(scores.front(), d.labels());
    curve.auroc_error = auroc_error(scores.front(), d.labels(), config.resamples, seed);
    return curve;
  }
  std::vector<RocCurve> curves;
  for (const auto& s : scores) curves.push_back(roc(s, d.labels()));
  RocCurve curve = envelope(curves, config.grid);
  curve.auroc_error = ensemble_auroc_error(scores, d.labels(), config.resamples, seed, config.grid);
  return curve;
}

std::unique_ptr<Solver> make_solver(const RunConfig& config, const std::string& method) {
  if (method == "sae-z") return std::make_unique<SimulatedAnnealer>(config.solver.long_schedule);
  if (method == "sa-z" || config.solver.kind == "sa")
    return std::make_unique<SimulatedAnnealer>(config.solver.schedule);
  return std::make_unique<ExactSolver>();
}

}  // namespace

MethodOutcome run_method(const std::string& method, const SplitDataset& split,
                         const RunConfig& config, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const auto bank = build_bank(split.train);
  auto set = std::make_shared<const AugmentedClassifierSet>(bank, config.offset_bound, config.delta);
  const CrossTerms mode = config.full_cross_terms ? CrossTerms::full : CrossTerms::within_offset;

  MethodOutcome out;
  out.method = method;
  if (is_zoom_method(method)) {
    const auto cache = build_cache(*set, split.train, mode);
    ZoomConfig cfg = config.zoom;
    cfg.seed = seed;
    if (method == "sa-z") cfg.excited_max = {1};
    const auto solver = make_solver(config, method);
    const auto zoom = run_zoom(cache, *solver, cfg);
    for (const auto& m : zoom.ensemble) out.members.emplace_back(m.mu, set);

    const auto test_cache = build_cache(*set, split.test, mode);
    const Matrix train_out = set->outputs(split.train);
    const Matrix test_out = set->outputs(split.test);
    for (const auto& rec : zoom.trace.records) {
      TraceRow row;
      row.record = rec;
      row.test_energy = energy_haug(test_cache, rec.mu);
      row.train_auroc = roc(scores_from_outputs(train_out, rec.mu), split.train.labels()).auroc;
      row.test_auroc = roc(scores_from_outputs(test_out, rec.mu), split.test.labels()).auroc;
      out.trace.push_back(std::move(row));
    }
  } else if (method == "qaml") {
    auto base = config.qaml_augmented
                    ? set
                    : std::make_shared<const AugmentedClassifierSet>(bank, 0, config.delta);
    const auto cache = build_cache(*base, split.train, mode);
    const auto solver = make_solver(config, method);
    out.members.push_back(train_qaml(cache, base, config.lambda, *solver, seed));
  } else if (method == "lr") {
    out.members.push_back(train_lr(split.train, set, config.lr));
  } else {
    throw ArgumentError("unknown method '" + method + "'");
  }

  out.train_roc = evaluate_members(out.members, split.train, config, derive_seed(seed, {7}));
  out.test_roc = evaluate_members(out.members, split.test, config, derive_seed(seed, {8}));
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string roc_csv(const RocCurve& curve) {
  std::ostringstream out;
  out << "efficiency,rejection\n";
  for (const auto& p : curve.points) out << format_real(p.efficiency) << ',' << format_real(p.rejection) << '\n';
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

json run_train(const RunConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const Dataset data = load_data(config);
  const SplitDataset sp = split(data, config.train_fraction, derive_seed(config.seed, {1}));
  const auto bank = build_bank(sp.train);

  json artifact;
  artifact["schema"] = kSchemaVersion;
  artifact["version"] = version();
  artifact["config"] = to_json(config);
  artifact["data"] = {{"train_size", sp.train.size()},
                      {"test_size", sp.test.size()},
                      {"features", data.n_features()},
                      {"train_signal", sp.train.count(1)},
                      {"test_signal", sp.test.count(1)},
                      {"warnings", bank.warnings()}};
  json methods = json::array();
  json timings = json::object();
  for (const auto& name : config.methods) {
    const auto outcome = run_method(name, sp, config, method_seed(config.seed, name));
    json m;
    m["name"] = name;
    m["train"] = {{"auroc", outcome.train_roc.auroc}, {"auroc_error", outcome.train_roc.auroc_error}};
    m["test"] = {{"auroc", outcome.test_roc.auroc}, {"auroc_error", outcome.test_roc.auroc_error}};
    m["n_members"] = outcome.members.size();
    json weights = json::array();
    for (const auto& member : outcome.members) weights.push_back(member.weights());
    m["weights"] = std::move(weights);
    json trace = json::array();
    for (const auto& row : outcome.trace) {
      json r = to_json(row.record);
      r["test_energy"] = row.test_energy;
      r["train_auroc"] = row.train_auroc;
      r["test_auroc"] = row.test_auroc;
      trace.push_back(std::move(r));
    }
    m["trace"] = std::move(trace);
    json points = json::array();
    for (const auto& p : outcome.test_roc.points) points.push_back({p.efficiency, p.rejection});
    m["roc"] = std::move(points);
    timings[name] = outcome.seconds;
    write_file_atomic(config.output / ("roc_" + name + ".csv"), roc_csv(outcome.test_roc));
    methods.push_back(std::move(m));
  }
  artifact["methods"] = std::move(methods);
  timings["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  artifact["timings"] = std::move(timings);
  write_file_atomic(config.output / "artifact.json", artifact.dump(2) + "\n");
  return artifact;
}

std::vector<SweepCell> run_sweep(const RunConfig& config, const SweepOptions& options) {
  config.validate();
  if (options.sizes.empty()) throw ArgumentError("sweep needs at least one training size");
  if (options.replicates < 1) throw ArgumentError("sweep needs at least one replicate");
  const Dataset data = load_data(config);
  for (std::size_t s : options.sizes) {
    if (s < 2 || s >= data.size())
      throw ArgumentError("training size " + std::to_string(s) + " does not fit a dataset of " +
                          std::to_string(data.size()) + " examples");
  }

  std::vector<SweepCell> cells;
  for (std::size_t s : options.sizes)
    for (std::size_t r = 0; r < options.replicates; ++r)
      for (const auto& m : config.methods) cells.push_back({s, r, m, 0.0, 0.0, {}});

  const auto count = static_cast<long long>(cells.size());
  const int jobs = static_cast<int>(std::max<std::size_t>(1, options.jobs));
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (long long k = 0; k < count; ++k) {
    auto& cell = cells[static_cast<std::size_t>(k)];
    const std::uint64_t cell_seed = derive_seed(config.seed, {cell.size, cell.replicate});
    json record = {{"size", cell.size}, {"replicate", cell.replicate}, {"method", cell.method}};
    try {
      const auto sp = split_count(data, cell.size, cell_seed);
      const auto outcome = run_method(cell.method, sp, config, method_seed(cell_seed, cell.method));
      cell.auroc = outcome.test_roc.auroc;
      cell.auroc_error = outcome.test_roc.auroc_error;
      record["auroc"] = cell.auroc;
      record["auroc_error"] = cell.auroc_error;
    } catch (const std::exception& e) {
      cell.error = e.what();
      record["error"] = cell.error;
    }
    try {
      write_file_atomic(config.output / "cells" /
                            ("size" + std::to_string(cell.size) + "_rep" +
                             std::to_string(cell.replicate) + "_" + cell.method + ".json"),
                        record.dump() + "\n");
    } catch (const std::exception& e) {
      if (cell.error.empty()) cell.error = e.what();
    }
  }
  return cells;
}

std::vector<SweepSummaryRow> summarize(const std::vector<SweepCell>& cells) {
  std::vector<SweepSummaryRow> rows;
  std::map<std::pair<std::size_t, std::string>, std::vector<const SweepCell*>> groups;
  for (const auto& c : cells) {
    if (!c.error.empty()) continue;
    auto& g = groups[{c.size, c.method}];
    if (g.empty()) rows.push_back({c.size, c.method, 0, 0.0, 0.0});
    g.push_back(&c);
  }
  for (auto& row : rows) {
    const auto& g = groups[{row.size, row.method}];
    const double n = static_cast<double>(g.size());
    double mean = 0.0, stat = 0.0;
    for (const auto* c : g) {
      mean += c->auroc;
      stat += c->auroc_error * c->auroc_error;
    }
    mean /= n;
    double var = 0.0;
    if (g.size() > 1) {
      for (const auto* c : g) var += (c->auroc - mean) * (c->auroc - mean);
      var /= n - 1.0;
    }
    row.replicates = g.size();
    row.mean_auroc = mean;
    row.error = std::sqrt(var + stat / n);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepSummaryRow& a, const SweepSummaryRow& b) { return a.size < b.size; });
  return rows;
}

void write_sweep(const std::vector<SweepCell>& cells, const std::filesystem::path& dir) {
  std::ostringstream results;
  results << "size,replicate,method,auroc,auroc_error\n";
  std::ostringstream failures;
  failures << "size,replicate,method,error\n";
  bool failed = false;
  for (const auto& c : cells) {
    if (!c.error.empty()) {
      failed = true;
      std::string msg = c.error;
      std::replace(msg.begin(), msg.end(), '"', '\'');
      failures << c.size << ',' << c.replicate << ',' << c.method << ",\"" << msg << "\"\n";
      continue;
    }
    results << c.size << ',' << c.replicate << ',' << c.method << ',' << format_real(c.auroc) << ','
            << format_real(c.auroc_error) << '\n';
  }
  std::ostringstream summary;
  summary << "size,method,replicates,mean_auroc,error\n";
  for (const auto& r : summarize(cells)) {
    summary << r.size << ',' << r.method << ',' << r.replicates << ',' << format_real(r.mean_auroc)
            << ',' << format_real(r.error) << '\n';
  }
  write_file_atomic(dir / "results.csv", results.str());
  write_file_atomic(dir / "summary.csv", summary.str());
  if (failed) write_file_atomic(dir / "failures.csv", failures.str());
}

}  // namespace qamlz
