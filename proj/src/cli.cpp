#include "qamlz/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "qamlz/errors.hpp"
#include "qamlz/pipeline.hpp"

namespace qamlz::cli {

namespace {

using nlohmann::json;

// Flags shared by train and sweep; each one overrides the config file.
struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> data;
  bool header = false;
  std::optional<std::size_t> signal, background, features;
  std::optional<double> separation;
  std::optional<double> train_fraction;
  std::optional<int> offset_bound;
  std::optional<double> delta;
  bool full_cross_terms = false;
  std::optional<std::size_t> iterations;
  std::optional<double> keep_fraction;
  std::optional<std::string> solver;
  std::optional<std::size_t> sweeps, reads;
  std::optional<double> lambda;
  std::optional<std::size_t> resamples;
  std::vector<std::string> methods;
  std::optional<std::string> output;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--seed", seed, "Master seed (default: $QAMLZ_SEED)");
    app.add_option("--data", data, "CSV dataset (last column is the label)");
    app.add_flag("--header", header, "Skip the first CSV line");
    app.add_option("--signal", signal, "Synthetic signal count");
    app.add_option("--background", background, "Synthetic background count");
    app.add_option("--features", features, "Synthetic feature count");
    app.add_option("--sep", separation, "Synthetic class separation");
    app.add_option("--train-fraction", train_fraction, "Training fraction of the split");
    app.add_option("--offsets", offset_bound, "Augmentation offset bound A");
    app.add_option("--delta", delta, "Augmentation step size");
    app.add_flag("--full-cross-terms", full_cross_terms, "Couple classifiers across offsets");
    app.add_option("--iterations,-T", iterations, "Zoom iterations");
    app.add_option("--keep-fraction", keep_fraction, "Fraction of couplings kept by pruning");
    app.add_option("--solver", solver, "sa or exact")->check(CLI::IsMember({"sa", "exact"}));
    app.add_option("--sweeps", sweeps, "SA sweeps per read");
    app.add_option("--reads", reads, "SA reads");
    app.add_option("--lambda", lambda, "QAML regularization");
    app.add_option("--resamples", resamples, "Poisson resamples for AUROC errors");
    app.add_option("--method,--methods", methods, "Methods to run")->delimiter(',');
    app.add_option("-o,--out", output, "Output directory");
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    const bool config_has_seed = !config_path.empty() && [&] {
      std::ifstream in(config_path);
      return json::parse(in).contains("seed");
    }();
    if (seed) {
      c.seed = *seed;
    } else if (!config_has_seed) {
      const char* env = std::getenv("QAMLZ_SEED");
      if (env == nullptr) throw ArgumentError("a seed is required: pass --seed, set it in the config, or set QAMLZ_SEED");
      try {
        c.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw ArgumentError("QAMLZ_SEED is not an unsigned integer");
      }
    }
    if (data) c.data.csv = *data;
    if (header) c.data.header = true;
    if (signal) c.data.synthetic.n_signal = *signal;
    if (background) c.data.synthetic.n_background = *background;
    if (features) c.data.synthetic.n_features = *features;
    if (separation) c.data.synthetic.separation = *separation;
    if (train_fraction) c.train_fraction = *train_fraction;
    if (offset_bound) c.offset_bound = *offset_bound;
    if (delta) c.delta = *delta;
    if (full_cross_terms) c.full_cross_terms = true;
    if (iterations) c.zoom.iterations = *iterations;
    if (keep_fraction) c.zoom.keep_fraction = *keep_fraction;
    if (solver) c.solver.kind = *solver;
    if (sweeps) c.solver.schedule.sweeps = *sweeps;
    if (reads) c.solver.schedule.reads = *reads;
    if (lambda) c.lambda = *lambda;
    if (resamples) c.resamples = *resamples;
    if (!methods.empty()) c.methods = methods;
    if (output) c.output = *output;
    c.validate();
    return c;
  }
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void print_table(const json& artifact, std::ostream& out) {
  out << std::left << std::setw(8) << "method" << std::right << std::setw(20) << "train AUROC"
      << std::setw(20) << "test AUROC" << std::setw(9) << "members" << '\n';
  for (const auto& m : artifact.at("methods")) {
    const auto cell = [&](const char* which) {
      const auto& r = m.at(which);
      return fixed(r.at("auroc").get<double>()) + " +- " + fixed(r.at("auroc_error").get<double>());
    };
    out << std::left << std::setw(8) << m.at("name").get<std::string>() << std::right << std::setw(20)
        << cell("train") << std::setw(20) << cell("test") << std::setw(9)
        << m.at("n_members").get<std::size_t>() << '\n';
  }
}

int cmd_gen_data(const SyntheticSpec& spec, std::optional<std::uint64_t> seed, const std::string& path,
                 std::ostream& out) {
  std::uint64_t s = 0;
  if (seed) {
    s = *seed;
  } else if (const char* env = std::getenv("QAMLZ_SEED")) {
    s = std::stoull(env);
  } else {
    throw ArgumentError("a seed is required: pass --seed or set QAMLZ_SEED");
  }
  const auto d = generate_synthetic(spec, s);
  write_csv(d, path);
  out << "wrote " << path << ": S=" << d.size() << " F=" << d.n_features()
      << " signal=" << d.count(1) << " background=" << d.count(-1) << '\n';
  return kExitOk;
}

int cmd_train(const Overrides& o, std::ostream& out) {
  const RunConfig c = o.resolve();
  const json artifact = run_train(c);
  print_table(artifact, out);
  out << "artifact: " << (c.output / "artifact.json").string() << '\n';
  return kExitOk;
}

int cmd_sweep(const Overrides& o, const SweepOptions& opts, std::ostream& out, std::ostream& err) {
  const RunConfig c = o.resolve();
  const auto cells = run_sweep(c, opts);
  write_sweep(cells, c.output);
  out << std::left << std::setw(8) << "size" << std::setw(8) << "method" << std::right
      << std::setw(6) << "reps" << std::setw(22) << "AUROC" << '\n';
  for (const auto& r : summarize(cells)) {
    out << std::left << std::setw(8) << r.size << std::setw(8) << r.method << std::right
        << std::setw(6) << r.replicates << std::setw(22)
        << (fixed(r.mean_auroc) + " +- " + fixed(r.error)) << '\n';
  }
  bool failed = false;
  for (const auto& cell : cells) {
    if (cell.error.empty()) continue;
    failed = true;
    err << "cell size=" << cell.size << " replicate=" << cell.replicate << " method=" << cell.method
        << " failed: " << cell.error << '\n';
  }
  out << "results: " << (c.output / "results.csv").string() << '\n';
  return failed ? kExitFailure : kExitOk;
}

const json& find_method(const json& artifact, const std::string& name) {
  for (const auto& m : artifact.at("methods")) {
    if (name.empty() && !m.at("trace").empty()) return m;
    if (m.at("name") == name) return m;
  }
  if (name.empty()) throw Error("artifact has no zoom trace");
  throw Error("artifact has no method '" + name + "'");
}

int cmd_show(const std::string& path, bool roc_flag, bool trace_flag, const std::string& method,
             std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  json artifact;
  try {
    artifact = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(path + " is not valid JSON: " + e.what());
  }
  if (!artifact.is_object() || artifact.value("schema", 0) != kSchemaVersion || !artifact.contains("methods"))
    throw Error(path + " is not a qamlz artifact");

  if (roc_flag) {
    const auto& m = method.empty() ? artifact.at("methods").at(0) : find_method(artifact, method);
    out << "efficiency,rejection\n";
    for (const auto& p : m.at("roc"))
      out << format_real(p.at(0).get<double>()) << ',' << format_real(p.at(1).get<double>()) << '\n';
    return kExitOk;
  }
  if (trace_flag) {
    // t,sigma,train_energy,test_energy,train_auroc,test_auroc
    const auto& m = find_method(artifact, method);
    for (const auto& r : m.at("trace")) {
      out << r.at("t").get<std::size_t>() << ',' << format_real(r.at("sigma").get<double>()) << ','
          << format_real(r.at("train_energy").get<double>()) << ','
          << format_real(r.at("test_energy").get<double>()) << ','
          << format_real(r.at("train_auroc").get<double>()) << ','
          << format_real(r.at("test_auroc").get<double>()) << '\n';
    }
    return kExitOk;
  }
  print_table(artifact, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zooming annealing ensembles of augmented weak classifiers", "qamlz"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  auto* gen = app.add_subcommand("gen-data", "Write a synthetic Gaussian dataset as CSV");
  SyntheticSpec spec;
  std::optional<std::uint64_t> gen_seed;
  std::string gen_out;
  gen->add_option("--signal", spec.n_signal, "Signal examples")->capture_default_str();
  gen->add_option("--background", spec.n_background, "Background examples")->capture_default_str();
  gen->add_option("--features", spec.n_features, "Features")->capture_default_str();
  gen->add_option("--sep", spec.separation, "Class separation")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Seed (default: $QAMLZ_SEED)");
  gen->add_option("-o,--out", gen_out, "Output CSV path")->required();

  auto* train = app.add_subcommand("train", "Train and evaluate methods on one split");
  Overrides train_o;
  train_o.attach(*train);

  auto* sweep = app.add_subcommand("sweep", "AUROC versus training-set size over replicate splits");
  Overrides sweep_o;
  sweep_o.attach(*sweep);
  SweepOptions sweep_opts;
  sweep->add_option("--sizes", sweep_opts.sizes, "Training sizes")->delimiter(',')->required();
  sweep->add_option("--replicates", sweep_opts.replicates, "Replicate splits per size")->capture_default_str();
  sweep->add_option("--jobs", sweep_opts.jobs, "Cells run concurrently")->capture_default_str();

  auto* show = app.add_subcommand("show", "Summarize a run artifact");
  std::string show_path;
  bool show_roc = false, show_trace = false;
  std::string show_method;
  show->add_option("artifact", show_path, "artifact.json")->required();
  show->add_flag("--roc", show_roc, "Dump the test ROC curve as CSV");
  show->add_flag("--trace", show_trace, "Dump energy and AUROC per zoom iteration");
  show->add_option("--method", show_method, "Method for --roc/--trace");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (*gen) return cmd_gen_data(spec, gen_seed, gen_out, out);
    if (*train) return cmd_train(train_o, out);
    if (*sweep) return cmd_sweep(sweep_o, sweep_opts, out, err);
    if (*show) return cmd_show(show_path, show_roc, show_trace, show_method, out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace qamlz::cli
