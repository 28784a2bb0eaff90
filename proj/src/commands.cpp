#include "triage/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "triage/properties.hpp"
#include "triage/rng.hpp"
#include "triage/synth.hpp"
#include "triage/version.hpp"

namespace triage::cli {

namespace fs = std::filesystem;

namespace {

std::string fmtf(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += parts[i];
  }
  return out;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << content;
}

/// Display name for result rows: family for synthetic specs, file stem for
/// csv paths, the manifest key for named datasets.
std::string source_display_name(const DataSource& s) {
  if (!s.synthetic.empty())
    return s.synthetic.substr(0, s.synthetic.find(':'));
  if (!s.csv_path.empty()) return fs::path(s.csv_path).stem().string();
  if (!s.dataset_name.empty()) return s.dataset_name;
  throw std::invalid_argument("no data source given (use --synthetic, --csv, "
                              "or --dataset)");
}

/// File-backed sources load once and ignore the seed; synthetic sources
/// regenerate per seed.
DatasetProvider make_provider(const DataSource& source) {
  if (!source.synthetic.empty()) {
    const std::string spec = source.synthetic;
    return [spec](std::uint64_t seed) { return make_synthetic(spec, seed); };
  }
  const Dataset loaded = load_source(source, 0);
  return [loaded](std::uint64_t) { return loaded; };
}

std::vector<std::uint64_t> seed_range(int count) {
  if (count < 1) throw std::invalid_argument("seeds must be positive");
  std::vector<std::uint64_t> seeds(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) seeds[static_cast<size_t>(i)] = i;
  return seeds;
}

Perturbation condition_to_perturbation(const std::string& condition,
                                       std::uint64_t seed) {
  Perturbation p;
  p.seed = seed;
  if (condition == "clean") {
    p.kind = PerturbKind::kNone;
  } else if (condition == "jitter") {
    p.kind = PerturbKind::kJitter;
  } else if (condition == "loss5") {
    p.kind = PerturbKind::kPacketLoss;
    p.loss_fraction = 0.05;
  } else if (condition == "loss10") {
    p.kind = PerturbKind::kPacketLoss;
    p.loss_fraction = 0.10;
  } else if (condition == "noise01") {
    p.kind = PerturbKind::kNoise;
    p.noise_sigma = 0.1;
  } else if (condition == "noise03") {
    p.kind = PerturbKind::kNoise;
    p.noise_sigma = 0.3;
  } else if (condition == "drift") {
    p.kind = PerturbKind::kClockDrift;
  } else if (condition == "combined") {
    p.kind = PerturbKind::kCombined;
  } else {
    throw std::invalid_argument("unknown condition '" + condition +
                                "' (expected clean, jitter, loss5, loss10, "
                                "noise01, noise03, drift, or combined)");
  }
  return p;
}

}  // namespace

Dataset load_source(const DataSource& source, std::uint64_t seed) {
  const int set = !source.synthetic.empty() + !source.csv_path.empty() +
                  !source.dataset_name.empty();
  if (set == 0)
    throw std::invalid_argument("no data source given (use --synthetic, "
                                "--csv, or --dataset)");
  if (set > 1)
    throw std::invalid_argument("choose one of --synthetic, --csv, --dataset");

  if (!source.synthetic.empty()) return make_synthetic(source.synthetic, seed);
  if (!source.csv_path.empty()) {
    std::optional<std::string> label;
    if (!source.label_column.empty()) label = source.label_column;
    return load_csv(source.csv_path, label);
  }
  std::optional<std::string> manifest;
  if (!source.manifest_path.empty()) manifest = source.manifest_path;
  return resolve_dataset(source.dataset_name, manifest);
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::vector<std::string>& config_lines,
                    const std::vector<std::string>& output_files) {
  fs::create_directories(out_dir);
  std::string text = "command = " + command + "\n";
  text += std::string("version = ") + kVersion + "\n";
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[64];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  text += std::string("started = ") + stamp + "\n";
  for (const std::string& line : config_lines) {
    text += line;
    if (line.empty() || line.back() != '\n') text += '\n';
  }
  for (const std::string& f : output_files) text += "output = " + f + "\n";
  write_text_file(fs::path(out_dir) / "manifest.txt", text);
}

int run_sweep(const SweepArgs& args) {
  SweepConfig cfg = args.cfg;
  if (!args.preset_path.empty())
    cfg.triage = load_preset(args.preset_path, cfg.triage);
  cfg.triage.validate();

  std::vector<Method> methods;
  methods.reserve(args.methods.size());
  for (const std::string& m : args.methods)
    methods.push_back(method_from_string(m));

  const std::string name = source_display_name(args.source);
  const DatasetProvider provider = make_provider(args.source);
  const std::vector<std::uint64_t> seeds = seed_range(args.seeds);

  std::vector<std::string> config_lines = {format_config(cfg.triage)};
  config_lines.push_back("methods = " + join(args.methods));
  std::string budgets_line = "budgets =";
  for (double b : args.budgets) budgets_line += fmtf(" %.6f", b);
  config_lines.push_back(budgets_line);
  config_lines.push_back("seeds = " + std::to_string(args.seeds));
  config_lines.push_back("jobs = " + std::to_string(cfg.jobs));
  if (!args.preset_path.empty())
    config_lines.push_back("preset = " + args.preset_path);
  write_manifest(args.out_dir, "sweep", config_lines, {"pareto.csv"});

  const EvalReport report =
      pareto_sweep(provider, name, methods, args.budgets, seeds, cfg);
  write_text_file(fs::path(args.out_dir) / "pareto.csv", report.to_csv());
  return kOk;
}

int run_adaptivity(const AdaptivityArgs& args) {
  if (args.lambdas.empty())
    throw std::invalid_argument("adaptivity needs at least one lambda");
  const std::vector<std::uint64_t> seeds = seed_range(args.seeds);
  args.cfg.triage.validate();

  std::vector<std::string> outputs = {"reaction.csv"};
  for (double lambda : args.lambdas)
    outputs.push_back("trace_lambda" + fmtf("%.2f", lambda) + ".csv");
  write_manifest(args.out_dir, "adaptivity",
                 {format_config(args.cfg.triage),
                  "onset = " + std::to_string(args.onset),
                  "seeds = " + std::to_string(args.seeds)},
                 outputs);

  const int w = args.cfg.triage.window;
  const long long onset_window = args.onset / w;

  std::string reaction = "lambda,seed,reaction_windows\n";
  for (double lambda : args.lambdas) {
    for (std::uint64_t seed : seeds) {
      const Dataset data = load_source(args.source, seed);
      const int d = data.cols();
      const long long windows = data.rows() / w;
      if (windows < 2)
        throw std::invalid_argument("adaptivity: stream shorter than two windows");

      TriageConfig tcfg = args.cfg.triage;
      tcfg.lambda = lambda;
      tcfg.k = std::min(tcfg.k, std::min(d, w));
      for (int& ek : tcfg.ensemble_ks) ek = std::min(ek, std::min(d, w));
      TriageStream stream(tcfg);

      Eigen::MatrixXd trace(windows, d);
      for (long long wi = 0; wi < windows; ++wi) {
        stream.step(data.values.middleRows(wi * w, w));
        trace.row(wi) = stream.smoothed_scores()->transpose();
      }

      const int top_n = std::min(args.top_n, d);
      const std::optional<long long> tau =
          reaction_time(trace, onset_window, top_n, args.change_fraction);
      reaction += fmtf("%.2f", lambda) + "," + std::to_string(seed) + "," +
                  (tau ? std::to_string(*tau) : std::string("none")) + "\n";

      if (seed == seeds.front()) {
        std::string tr = "window";
        for (const std::string& ch : data.channel_names) tr += "," + ch;
        tr += "\n";
        for (long long wi = 0; wi < windows; ++wi) {
          tr += std::to_string(wi);
          for (int j = 0; j < d; ++j) tr += fmtf(",%.6f", trace(wi, j));
          tr += "\n";
        }
        write_text_file(fs::path(args.out_dir) /
                            ("trace_lambda" + fmtf("%.2f", lambda) + ".csv"),
                        tr);
      }
    }
  }
  write_text_file(fs::path(args.out_dir) / "reaction.csv", reaction);
  return kOk;
}

int run_scale(const ScaleArgs& args) {
  if (args.dims.empty())
    throw std::invalid_argument("scale needs at least one channel count");
  args.cfg.triage.validate();
  write_manifest(args.out_dir, "scale",
                 {format_config(args.cfg.triage),
                  "reps = " + std::to_string(args.reps)},
                 {"scale.csv"});

  std::string csv = "channels,ms_per_window\n";
  const int w = args.cfg.triage.window;
  for (int d : args.dims) {
    if (d < 1) throw std::invalid_argument("scale: channel count must be positive");
    TriageConfig tcfg = args.cfg.triage;
    tcfg.k = std::min(tcfg.k, std::min(d, w));
    for (int& ek : tcfg.ensemble_ks) ek = std::min(ek, std::min(d, w));

    Rng rng(derive_seed(args.seed, static_cast<std::uint64_t>(d)));
    Eigen::MatrixXd block(w, d);
    for (int t = 0; t < w; ++t)
      for (int j = 0; j < d; ++j) block(t, j) = rng.gaussian();

    TriageStream stream(tcfg);
    const std::vector<double> ms = timing_probe(
        [&](int) { stream.step(block); }, {d}, args.reps);
    csv += std::to_string(d) + fmtf(",%.6f", ms[0]) + "\n";
  }
  write_text_file(fs::path(args.out_dir) / "scale.csv", csv);
  return kOk;
}

int run_theory_check(const TheoryArgs& args) {
  if (args.seeds < 1) throw std::invalid_argument("seeds must be positive");
  bool all_pass = true;
  for (int rep = 0; rep < args.seeds; ++rep) {
    const std::uint64_t seed =
        rep == 0 ? args.seed
                 : derive_seed(args.seed, static_cast<std::uint64_t>(rep));
    const std::vector<props::PropertyResult> results =
        props::run_all(seed, args.only);
    for (const props::PropertyResult& r : results) {
      std::printf("%-22s %s  (%s)\n", r.name.c_str(),
                  r.pass ? "PASS" : "FAIL", r.measured.c_str());
      all_pass = all_pass && r.pass;
    }
  }
  return all_pass ? kOk : kPropertyFailure;
}

int run_perturb_eval(const PerturbArgs& args) {
  if (args.conditions.empty())
    throw std::invalid_argument("perturb-eval needs at least one condition");
  SweepConfig cfg = args.cfg;
  cfg.triage.validate();
  for (const std::string& c : args.conditions)
    condition_to_perturbation(c, 0);  // fail fast on unknown names

  write_manifest(args.out_dir, "perturb-eval",
                 {format_config(cfg.triage),
                  "conditions = " + join(args.conditions),
                  "budget = " + fmtf("%.6f", args.budget),
                  "seeds = " + std::to_string(args.seeds)},
                 {"perturb.csv"});

  const std::string name = source_display_name(args.source);
  std::string csv = "condition,seed,f1,commanded_bw,realized_bw\n";
  for (const std::string& condition : args.conditions) {
    for (std::uint64_t seed : seed_range(args.seeds)) {
      const Dataset clean = load_source(args.source, seed);
      const Dataset data =
          perturb(clean, condition_to_perturbation(condition, seed));
      const EvalRow row =
          run_cell(data, name, Method::kPca, args.budget, seed, cfg);
      csv += condition + "," + std::to_string(seed) +
             fmtf(",%.6f", row.f1) + fmtf(",%.6f", row.commanded_bw) +
             fmtf(",%.6f", row.realized_bw) + "\n";
    }
  }
  write_text_file(fs::path(args.out_dir) / "perturb.csv", csv);
  return kOk;
}

int run_joint(const JointArgs& args) {
  if (args.methods.empty())
    throw std::invalid_argument("joint needs at least one method");
  SweepConfig cfg = args.cfg;
  cfg.sod_delta = args.delta;
  cfg.triage.validate();

  std::vector<Method> methods;
  for (const std::string& m : args.methods)
    methods.push_back(method_from_string(m));

  write_manifest(args.out_dir, "joint",
                 {format_config(cfg.triage),
                  "methods = " + join(args.methods),
                  "budget = " + fmtf("%.6f", args.budget),
                  "delta = " + fmtf("%.6f", args.delta),
                  "seeds = " + std::to_string(args.seeds)},
                 {"joint.csv"});

  const std::string name = source_display_name(args.source);
  std::string csv = "method,seed,f1,commanded_bw,realized_bw\n";
  for (size_t mi = 0; mi < methods.size(); ++mi) {
    for (std::uint64_t seed : seed_range(args.seeds)) {
      const Dataset data = load_source(args.source, seed);
      const EvalRow row =
          run_cell(data, name, methods[mi], args.budget, seed, cfg);
      csv += args.methods[mi] + "," + std::to_string(seed) +
             fmtf(",%.6f", row.f1) + fmtf(",%.6f", row.commanded_bw) +
             fmtf(",%.6f", row.realized_bw) + "\n";
    }
  }
  write_text_file(fs::path(args.out_dir) / "joint.csv", csv);
  return kOk;
}

}  // namespace triage::cli
