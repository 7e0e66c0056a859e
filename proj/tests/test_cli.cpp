#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qamlz/cli.hpp"

namespace qamlz {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("qamlz_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// Small, fast settings shared by the train and sweep tests.
std::vector<std::string> quick(std::vector<std::string> args, const fs::path& out) {
  for (const char* a : {"--seed", "5", "--signal", "120", "--background", "120", "--sweeps", "30",
                        "--reads", "12", "--resamples", "10"})
    args.emplace_back(a);
  args.emplace_back("-o");
  args.push_back(out.string());
  return args;
}

TEST(CliGenData, WritesRequestedRows) {
  const auto dir = fresh_dir("gen");
  const auto path = (dir / "d.csv").string();
  const auto r = run({"gen-data", "--signal", "1000", "--background", "1000", "--features", "8",
                      "--sep", "2.0", "--seed", "1", "-o", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(slurp(path)), 2000u);
}

TEST(CliGenData, UsageAndValidationErrors) {
  EXPECT_EQ(run({"gen-data", "--signal", "10", "--seed", "1"}).code, cli::kExitUsage);
  const auto dir = fresh_dir("gen_bad");
  EXPECT_EQ(run({"gen-data", "--sep", "-1", "--seed", "1", "-o", (dir / "x.csv").string()}).code,
            cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({}).code, cli::kExitUsage);
}

TEST(CliGenData, UnwritablePathFails) {
  EXPECT_EQ(run({"gen-data", "--seed", "1", "-o", "/nonexistent_dir/x/d.csv"}).code,
            cli::kExitFailure);
}

TEST(CliGenData, SeedFromEnvironment) {
  const auto dir = fresh_dir("gen_env");
  ::unsetenv("QAMLZ_SEED");
  EXPECT_EQ(run({"gen-data", "-o", (dir / "a.csv").string()}).code, cli::kExitUsage);
  ::setenv("QAMLZ_SEED", "3", 1);
  EXPECT_EQ(run({"gen-data", "--signal", "5", "--background", "5", "-o", (dir / "a.csv").string()})
                .code,
            0);
  ::unsetenv("QAMLZ_SEED");
  run({"gen-data", "--signal", "5", "--background", "5", "--seed", "3", "-o",
       (dir / "b.csv").string()});
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
}

TEST(CliTrain, ZoomArtifactHasFullTrace) {
  const auto dir = fresh_dir("train_zoom");
  const auto r = run(quick({"train", "--method", "qaml-z"}, dir));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto artifact = nlohmann::json::parse(slurp(dir / "artifact.json"));
  EXPECT_EQ(artifact.at("schema"), 1);
  const auto& m = artifact.at("methods").at(0);
  EXPECT_EQ(m.at("name"), "qaml-z");
  EXPECT_EQ(m.at("trace").size(), 8u);
  EXPECT_TRUE(fs::exists(dir / "roc_qaml-z.csv"));

  const auto trace = run({"show", (dir / "artifact.json").string(), "--trace"});
  ASSERT_EQ(trace.code, 0) << trace.err;
  EXPECT_EQ(count_lines(trace.out), 8u);
  const auto curve = run({"show", (dir / "artifact.json").string(), "--roc"});
  EXPECT_EQ(curve.out.rfind("efficiency,rejection\n", 0), 0u);
}

TEST(CliTrain, QamlWeightsAreBinary) {
  const auto dir = fresh_dir("train_qaml");
  const auto r = run(quick({"train", "--method", "qaml", "--lambda", "0"}, dir));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto artifact = nlohmann::json::parse(slurp(dir / "artifact.json"));
  const auto& weights = artifact.at("methods").at(0).at("weights");
  ASSERT_FALSE(weights.empty());
  for (const auto& member : weights)
    for (double w : member) EXPECT_TRUE(w == 0.0 || w == 1.0);
}

TEST(CliTrain, RerunIsIdenticalAndShowRoundTrips) {
  const auto a = fresh_dir("train_a");
  const auto b = fresh_dir("train_b");
  const auto ra = run(quick({"train", "--methods", "sa-z,qaml,lr"}, a));
  const auto rb = run(quick({"train", "--methods", "sa-z,qaml,lr"}, b));
  ASSERT_EQ(ra.code, 0) << ra.err;
  auto table = [](const std::string& s) { return s.substr(0, s.find("artifact:")); };
  EXPECT_EQ(table(ra.out), table(rb.out));
  auto ja = nlohmann::json::parse(slurp(a / "artifact.json"));
  auto jb = nlohmann::json::parse(slurp(b / "artifact.json"));
  for (std::size_t k = 0; k < 3; ++k)
    EXPECT_EQ(ja["methods"][k]["test"].dump(), jb["methods"][k]["test"].dump());
  EXPECT_EQ(ja["methods"].size(), 3u);

  const auto shown = run({"show", (a / "artifact.json").string()});
  ASSERT_EQ(shown.code, 0);
  EXPECT_EQ(shown.out, table(ra.out));
  EXPECT_EQ(count_lines(shown.out), 4u);  // header plus one row per method
}

TEST(CliTrain, ConfigFileAndOverrides) {
  const auto dir = fresh_dir("train_cfg");
  nlohmann::json cfg = {{"schema", 1},
                        {"seed", 9},
                        {"data", {{"signal", 80}, {"background", 80}}},
                        {"zoom", {{"iterations", 3}}},
                        {"solver", {{"schedule", {{"sweeps", 20}, {"reads", 8}}}}},
                        {"eval", {{"resamples", 5}}},
                        {"methods", {"qaml-z"}},
                        {"output", (dir / "from_config").string()}};
  std::ofstream(dir / "run.json") << cfg.dump();
  ASSERT_EQ(run({"train", "--config", (dir / "run.json").string()}).code, 0);
  auto artifact = nlohmann::json::parse(slurp(dir / "from_config" / "artifact.json"));
  EXPECT_EQ(artifact["methods"][0]["trace"].size(), 3u);

  // Flags win over the file.
  ASSERT_EQ(run({"train", "--config", (dir / "run.json").string(), "-T", "2", "-o",
                 (dir / "flag").string()})
                .code,
            0);
  artifact = nlohmann::json::parse(slurp(dir / "flag" / "artifact.json"));
  EXPECT_EQ(artifact["methods"][0]["trace"].size(), 2u);

  cfg["zoom"]["bogus"] = 1;
  std::ofstream(dir / "bad.json") << cfg.dump();
  EXPECT_EQ(run({"train", "--config", (dir / "bad.json").string()}).code, cli::kExitUsage);
  EXPECT_EQ(run(quick({"train", "--method", "nope"}, dir / "x")).code, cli::kExitUsage);
}

TEST(CliTrain, CsvInput) {
  const auto dir = fresh_dir("train_csv");
  ASSERT_EQ(run({"gen-data", "--signal", "60", "--background", "60", "--features", "3", "--seed",
                 "2", "-o", (dir / "d.csv").string()})
                .code,
            0);
  const auto r = run({"train", "--seed", "1", "--data", (dir / "d.csv").string(), "--method", "lr",
                      "--resamples", "5", "-o", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto artifact = nlohmann::json::parse(slurp(dir / "out" / "artifact.json"));
  EXPECT_EQ(artifact["data"]["features"], 3);
  EXPECT_EQ(run({"train", "--seed", "1", "--data", (dir / "missing.csv").string(), "-o",
                 (dir / "out2").string()})
                .code,
            cli::kExitFailure);
}

TEST(CliSweep, CountsRowsAndSummaries) {
  const auto dir = fresh_dir("sweep");
  const auto r = run(quick({"sweep", "--sizes", "100,200", "--replicates", "3", "--methods",
                            "qaml,lr", "--jobs", "2"},
                           dir));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto results = slurp(dir / "results.csv");
  EXPECT_EQ(results.rfind("size,replicate,method,auroc,auroc_error\n", 0), 0u);
  EXPECT_EQ(count_lines(results), 13u);
  EXPECT_EQ(count_lines(slurp(dir / "summary.csv")), 5u);
  EXPECT_EQ(std::distance(fs::directory_iterator(dir / "cells"), fs::directory_iterator{}), 12);
}

TEST(CliSweep, SingleCellSummaryEqualsCell) {
  const auto dir = fresh_dir("sweep_one");
  ASSERT_EQ(run(quick({"sweep", "--sizes", "100", "--methods", "lr"}, dir)).code, 0);
  std::istringstream results(slurp(dir / "results.csv"));
  std::istringstream summary(slurp(dir / "summary.csv"));
  std::string line, cell, row;
  std::getline(results, line);
  std::getline(results, cell);
  std::getline(summary, line);
  std::getline(summary, row);
  // size,replicate,method,auroc,err vs size,method,replicates,mean,err
  auto field = [](const std::string& s, int k) {
    std::istringstream in(s);
    std::string f;
    for (int i = 0; i <= k; ++i) std::getline(in, f, ',');
    return f;
  };
  EXPECT_EQ(field(cell, 3), field(row, 3));
  EXPECT_EQ(field(cell, 4), field(row, 4));
}

TEST(CliSweep, RepeatIsByteIdentical) {
  const auto a = fresh_dir("sweep_a");
  const auto b = fresh_dir("sweep_b");
  const std::vector<std::string> args{"sweep", "--sizes", "80", "--replicates", "2", "--methods",
                                      "sa-z,qaml"};
  ASSERT_EQ(run(quick(args, a)).code, 0);
  auto with_jobs = args;
  with_jobs.insert(with_jobs.end(), {"--jobs", "3"});
  ASSERT_EQ(run(quick(with_jobs, b)).code, 0);
  EXPECT_EQ(slurp(a / "results.csv"), slurp(b / "results.csv"));
  EXPECT_EQ(slurp(a / "summary.csv"), slurp(b / "summary.csv"));
}

TEST(CliSweep, FailedCellIsReported) {
  const auto dir = fresh_dir("sweep_fail");
  // 56 augmented classifiers are beyond exhaustive enumeration.
  const auto r =
      run(quick({"sweep", "--sizes", "100", "--methods", "qaml-z,lr", "--solver", "exact"}, dir));
  EXPECT_EQ(r.code, cli::kExitFailure);
  EXPECT_TRUE(fs::exists(dir / "failures.csv"));
  EXPECT_EQ(count_lines(slurp(dir / "results.csv")), 2u);
  EXPECT_NE(r.err.find("qaml-z"), std::string::npos);
  EXPECT_EQ(run(quick({"sweep", "--sizes", "1000", "--methods", "lr"}, dir)).code, cli::kExitUsage);
}

TEST(CliShow, MissingAndCorruptArtifacts) {
  const auto dir = fresh_dir("show");
  EXPECT_EQ(run({"show", (dir / "none.json").string()}).code, cli::kExitFailure);
  std::ofstream(dir / "bad.json") << "{\"schema\": 1, \"methods\": [";
  EXPECT_EQ(run({"show", (dir / "bad.json").string()}).code, cli::kExitFailure);
  EXPECT_EQ(run({"show"}).code, cli::kExitUsage);
}

TEST(CliHelp, PrintsUsage) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("sweep"), std::string::npos);
}

}  // namespace
}  // namespace qamlz
