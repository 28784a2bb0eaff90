#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "triage/eval.hpp"

namespace triage::cli {

/// Process exit codes shared by every command.
enum ExitCode {
  kOk = 0,
  kConfigError = 1,
  kDataError = 2,
  kPropertyFailure = 3,
};

/// Source selection shared by the data-driven commands. Exactly one of
/// synthetic / csv_path / dataset_name is set.
struct DataSource {
  std::string synthetic;    // make_synthetic spec string
  std::string csv_path;
  std::string label_column;
  std::string dataset_name;  // resolved through the dataset manifest
  std::string manifest_path; // optional override of the env variable
};

struct SweepArgs {
  DataSource source;
  std::vector<std::string> methods = {"pca", "uniform", "variance"};
  std::vector<double> budgets = {0.1, 0.2, 0.3, 0.5, 0.7, 0.9};
  int seeds = 3;
  std::string out_dir = "out";
  std::string preset_path;  // optional TriageConfig preset file
  SweepConfig cfg;          // triage knobs, jobs, measure_time
};

struct AdaptivityArgs {
  DataSource source;        // defaults to a regime-change stream
  std::vector<double> lambdas = {0.8, 1.0};
  int seeds = 5;
  long long onset = 300;    // sample index for synthetic default
  std::string out_dir = "out";
  SweepConfig cfg;
  int top_n = 5;
  double change_fraction = 0.2;
};

struct ScaleArgs {
  std::vector<int> dims = {25, 50, 100, 200, 400};
  int reps = 30;
  std::string out_dir = "out";
  SweepConfig cfg;
  std::uint64_t seed = 0;
};

struct TheoryArgs {
  std::string only;
  std::uint64_t seed = 0;
  int seeds = 1;  // repeats the suite with derived seeds
};

struct PerturbArgs {
  DataSource source;
  std::vector<std::string> conditions = {"clean",    "jitter",  "loss5",
                                         "loss10",   "noise01", "noise03",
                                         "drift",    "combined"};
  int seeds = 3;
  double budget = 0.5;
  std::string out_dir = "out";
  SweepConfig cfg;
};

struct JointArgs {
  DataSource source;
  std::vector<std::string> methods = {"pca",      "sod", "joint",
                                      "variance", "ogd", "uniform"};
  int seeds = 3;
  double budget = 0.5;
  double delta = 0.1;
  std::string out_dir = "out";
  SweepConfig cfg;
};

int run_sweep(const SweepArgs& args);
int run_adaptivity(const AdaptivityArgs& args);
int run_scale(const ScaleArgs& args);
int run_theory_check(const TheoryArgs& args);
int run_perturb_eval(const PerturbArgs& args);
int run_joint(const JointArgs& args);

/// Loads the dataset a DataSource points at (synthetic sources honor the
/// seed). Throws std::invalid_argument / std::runtime_error on bad input.
Dataset load_source(const DataSource& source, std::uint64_t seed);

/// Writes the run manifest (command, resolved config, seeds, outputs,
/// version, start time) into out_dir before any result file is produced.
void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::vector<std::string>& config_lines,
                    const std::vector<std::string>& output_files);

}  // namespace triage::cli
