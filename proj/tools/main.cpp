#include <exception>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "triage/commands.hpp"
#include "triage/config.hpp"
#include "triage/version.hpp"

namespace {

using triage::cli::DataSource;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  for (const std::string& t : split_list(s)) out.push_back(std::stod(t));
  return out;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  for (const std::string& t : split_list(s)) out.push_back(std::stoi(t));
  return out;
}

void add_source_options(CLI::App* cmd, DataSource& src) {
  cmd->add_option("--synthetic", src.synthetic,
                  "synthetic stream spec, family:key=value,... "
                  "(families: trio, groups, regime)");
  cmd->add_option("--csv", src.csv_path, "csv file, one column per channel");
  cmd->add_option("--label-column", src.label_column,
                  "label column name inside --csv");
  cmd->add_option("--dataset", src.dataset_name,
                  "dataset name resolved through the manifest");
  cmd->add_option("--manifest", src.manifest_path,
                  "dataset manifest file (default: TRIAGE_DATASET_MANIFEST)");
}

void add_triage_options(CLI::App* cmd, triage::TriageConfig& t,
                        std::string& scorer, std::string& recon) {
  cmd->add_option("--k", t.k, "components kept by the streaming model");
  cmd->add_option("--window", t.window, "samples per triage window");
  cmd->add_option("--lambda", t.lambda,
                  "score smoothing factor (1.0 = running mean)");
  cmd->add_option("--r-min", t.r_min, "per-channel sampling-rate floor");
  cmd->add_option("--gamma", t.gamma, "score sharpening exponent");
  cmd->add_option("--alpha", t.alpha, "hybrid scorer mix weight");
  cmd->add_option("--scorer", scorer,
                  "scorer: weighted, unweighted, hybrid, ensemble");
  cmd->add_option("--recon", recon,
                  "reconstruction: linear, forward_fill, zero");
}

void apply_strings(triage::TriageConfig& t, const std::string& scorer,
                   const std::string& recon) {
  if (!scorer.empty()) t.scorer = triage::scorer_from_string(scorer);
  if (!recon.empty()) t.recon = triage::recon_from_string(recon);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"per-channel sampling-rate triage benchmark"};
  app.set_version_flag("--version", triage::kVersion);
  app.require_subcommand(1);

  // --- sweep ----------------------------------------------------------
  triage::cli::SweepArgs sweep_args;
  std::string sweep_methods, sweep_budgets, sweep_scorer, sweep_recon;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "bandwidth/accuracy grid over methods, budgets, and seeds");
  add_source_options(sweep, sweep_args.source);
  add_triage_options(sweep, sweep_args.cfg.triage, sweep_scorer, sweep_recon);
  sweep->add_option("--methods", sweep_methods,
                    "comma-separated allocation methods");
  sweep->add_option("--budgets,--budget", sweep_budgets,
                    "comma-separated bandwidth budgets in (0, 1]");
  sweep->add_option("--seeds", sweep_args.seeds, "number of evaluation seeds");
  sweep->add_option("--jobs", sweep_args.cfg.jobs, "worker threads");
  sweep->add_option("--out", sweep_args.out_dir, "output directory");
  sweep->add_option("--preset", sweep_args.preset_path,
                    "triage config preset file");
  sweep->add_option("--knn", sweep_args.cfg.knn_k, "detector neighbor count");
  sweep->add_option("--train-fraction", sweep_args.cfg.train_fraction,
                    "chronological train split fraction");
  sweep->add_option("--sod-delta", sweep_args.cfg.sod_delta,
                    "send-on-delta threshold (standardized units)");
  sweep->add_flag("--measure-time", sweep_args.cfg.measure_time,
                  "record per-window processing time");

  // --- adaptivity -------------------------------------------------------
  triage::cli::AdaptivityArgs adapt_args;
  std::string adapt_lambdas, adapt_scorer, adapt_recon;
  CLI::App* adapt = app.add_subcommand(
      "adaptivity", "reaction time of the smoothed scores to a regime change");
  add_source_options(adapt, adapt_args.source);
  add_triage_options(adapt, adapt_args.cfg.triage, adapt_scorer, adapt_recon);
  adapt->add_option("--lambdas", adapt_lambdas,
                    "comma-separated smoothing factors to compare");
  adapt->add_option("--seeds", adapt_args.seeds, "number of seeds");
  adapt->add_option("--onset", adapt_args.onset,
                    "sample index where the regime changes");
  adapt->add_option("--out", adapt_args.out_dir, "output directory");
  adapt->add_option("--top-n", adapt_args.top_n, "leading channel set size");
  adapt->add_option("--change-fraction", adapt_args.change_fraction,
                    "fraction of the set that must move");

  // --- scale ------------------------------------------------------------
  triage::cli::ScaleArgs scale_args;
  std::string scale_dims, scale_scorer, scale_recon;
  CLI::App* scale = app.add_subcommand(
      "scale", "per-window processing time as channel count grows");
  add_triage_options(scale, scale_args.cfg.triage, scale_scorer, scale_recon);
  scale->add_option("--dims", scale_dims, "comma-separated channel counts");
  scale->add_option("--reps", scale_args.reps, "timed repetitions per size");
  scale->add_option("--out", scale_args.out_dir, "output directory");
  scale->add_option("--seed", scale_args.seed, "stream generator seed");

  // --- theory-check -----------------------------------------------------
  triage::cli::TheoryArgs theory_args;
  CLI::App* theory = app.add_subcommand(
      "theory-check", "run the named invariant checks and report PASS/FAIL");
  theory->add_option("--only", theory_args.only,
                     "substring filter on check names");
  theory->add_option("--seed", theory_args.seed, "base seed");
  theory->add_option("--seeds", theory_args.seeds,
                     "repeat the suite with derived seeds");

  // --- perturb-eval -----------------------------------------------------
  triage::cli::PerturbArgs perturb_args;
  std::string perturb_conditions, perturb_scorer, perturb_recon;
  CLI::App* perturb = app.add_subcommand(
      "perturb-eval", "detection score under stream corruptions");
  add_source_options(perturb, perturb_args.source);
  add_triage_options(perturb, perturb_args.cfg.triage, perturb_scorer,
                     perturb_recon);
  perturb->add_option("--conditions", perturb_conditions,
                      "comma-separated corruption conditions");
  perturb->add_option("--seeds", perturb_args.seeds, "number of seeds");
  perturb->add_option("--budget", perturb_args.budget, "bandwidth budget");
  perturb->add_option("--out", perturb_args.out_dir, "output directory");

  // --- joint ------------------------------------------------------------
  triage::cli::JointArgs joint_args;
  std::string joint_methods, joint_scorer, joint_recon;
  CLI::App* joint = app.add_subcommand(
      "joint", "spatial allocation vs temporal filtering vs both");
  add_source_options(joint, joint_args.source);
  add_triage_options(joint, joint_args.cfg.triage, joint_scorer, joint_recon);
  joint->add_option("--methods", joint_methods,
                    "comma-separated methods (e.g. pca,sod,joint)");
  joint->add_option("--seeds", joint_args.seeds, "number of seeds");
  joint->add_option("--budget", joint_args.budget, "bandwidth budget");
  joint->add_option("--delta", joint_args.delta,
                    "send-on-delta threshold (standardized units)");
  joint->add_option("--out", joint_args.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? triage::cli::kOk : triage::cli::kConfigError;
  }

  try {
    if (*sweep) {
      apply_strings(sweep_args.cfg.triage, sweep_scorer, sweep_recon);
      if (!sweep_methods.empty()) sweep_args.methods = split_list(sweep_methods);
      if (!sweep_budgets.empty())
        sweep_args.budgets = split_doubles(sweep_budgets);
      return triage::cli::run_sweep(sweep_args);
    }
    if (*adapt) {
      apply_strings(adapt_args.cfg.triage, adapt_scorer, adapt_recon);
      if (!adapt_lambdas.empty())
        adapt_args.lambdas = split_doubles(adapt_lambdas);
      return triage::cli::run_adaptivity(adapt_args);
    }
    if (*scale) {
      apply_strings(scale_args.cfg.triage, scale_scorer, scale_recon);
      if (!scale_dims.empty()) scale_args.dims = split_ints(scale_dims);
      return triage::cli::run_scale(scale_args);
    }
    if (*theory) return triage::cli::run_theory_check(theory_args);
    if (*perturb) {
      apply_strings(perturb_args.cfg.triage, perturb_scorer, perturb_recon);
      if (!perturb_conditions.empty())
        perturb_args.conditions = split_list(perturb_conditions);
      return triage::cli::run_perturb_eval(perturb_args);
    }
    if (*joint) {
      apply_strings(joint_args.cfg.triage, joint_scorer, joint_recon);
      if (!joint_methods.empty()) joint_args.methods = split_list(joint_methods);
      return triage::cli::run_joint(joint_args);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return triage::cli::kConfigError;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return triage::cli::kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return triage::cli::kConfigError;
  }
  std::cerr << app.help();
  return triage::cli::kConfigError;
}
