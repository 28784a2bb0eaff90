#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "triage/acquire.hpp"
#include "triage/baselines.hpp"
#include "triage/config.hpp"
#include "triage/dataset.hpp"
#include "triage/stream.hpp"

namespace triage {

/**
 * Weighted F1 of a k-nearest-neighbor vote.
 *
 * Train rows vote with Euclidean distance and majority rule (distance, then
 * train index, break ties; tied vote counts go to the smaller label). With
 * exactly two classes the F1 of the nonzero class is returned; with more,
 * the support-weighted mean of per-class F1. Callers are expected to
 * standardize features with train statistics first. Throws
 * std::invalid_argument on empty splits, k_nn > train rows, or single-class
 * train labels.
 */
double knn_f1(const Eigen::MatrixXd& train_x, const Eigen::VectorXi& train_y,
              const Eigen::MatrixXd& test_x, const Eigen::VectorXi& test_y,
              int k_nn = 5);

/// One evaluated (dataset, method, budget, seed) cell.
struct EvalRow {
  std::string dataset;
  Method method = Method::kUniform;
  double budget = 0.5;
  std::uint64_t seed = 0;
  ReconMethod recon = ReconMethod::kLinear;
  double f1 = 0.0;
  double ms_per_window = 0.0;
  double commanded_bw = 0.0;  // time-average of commanded mean rates
  double realized_bw = 0.0;   // retained fraction of the mask
};

struct EvalReport {
  std::vector<EvalRow> rows;

  /// Canonical CSV: fixed header, rows sorted by (dataset, method, budget,
  /// seed), floats at 6 decimals. Byte-identical across reruns.
  std::string to_csv() const;
  static const char* csv_header();
};

/// Everything pareto_sweep needs besides the grid itself.
struct SweepConfig {
  TriageConfig triage;
  BaselineConfig baseline;
  int knn_k = 5;
  double train_fraction = 0.7;
  double sod_delta = 0.1;  // send-on-delta threshold, standardized units
  int jobs = 1;
  bool measure_time = false;  // wall-clock timing breaks rerun byte-identity
};

/// Produces the dataset for a given evaluation seed. Synthetic sources
/// regenerate per seed; file-backed sources ignore the seed.
using DatasetProvider = std::function<Dataset(std::uint64_t seed)>;

/**
 * Full factorial evaluation: for every (method, budget, seed) the stream is
 * triaged window by window, acquired, reconstructed, split 70/30 in time,
 * standardized with train statistics, and scored with the kNN detector.
 * Budget >= 1 bypasses acquisition entirely (no triage at full budget), so
 * the score equals the untriaged score. Each cell derives its randomness
 * from its own coordinates; rows come back in canonical order regardless of
 * the number of worker threads.
 */
EvalReport pareto_sweep(const DatasetProvider& provider,
                        const std::string& dataset_name,
                        const std::vector<Method>& methods,
                        const std::vector<double>& budgets,
                        const std::vector<std::uint64_t>& seeds,
                        const SweepConfig& cfg);

/// Runs a single evaluation cell (exposed for the harness commands).
EvalRow run_cell(const Dataset& data, const std::string& dataset_name,
                 Method method, double budget, std::uint64_t seed,
                 const SweepConfig& cfg);

/**
 * Windows until the leading channel set moves.
 *
 * importance_trace is windows x d. The reference is the top_n set at window
 * onset_window - 1. Returned is the smallest tau >= 0 such that at window
 * onset_window + tau strictly more than change_fraction * top_n of the
 * reference channels have left the top-n set; std::nullopt when that never
 * happens. onset_window must be >= 1 and inside the trace.
 */
std::optional<long long> reaction_time(const Eigen::MatrixXd& importance_trace,
                                       long long onset_window, int top_n = 5,
                                       double change_fraction = 0.2);

/// (commanded mean rate over time, realized keep fraction).
struct BudgetAudit {
  double commanded = 0.0;
  double realized = 0.0;
};

/// Commanded is the per-sample mean of the scheduled rates (partial last
/// window weighted by its actual length); realized counts mask cells.
BudgetAudit budget_audit(const std::vector<RateVector>& rate_log,
                         int window_len, const AcquisitionMask& mask);

/**
 * Hourly transmission volume at a budget.
 *
 * full = channels * rate_hz * bytes_per_sample * 3600, reported under both
 * the 10^6 (mb_*) and 2^20 (mib_*) conventions; saved = (1 - budget) * full.
 */
struct CostBenefit {
  double mb_full = 0.0;
  double mb_saved = 0.0;
  double mib_full = 0.0;
  double mib_saved = 0.0;
};

CostBenefit cost_benefit(double budget, int channels, double rate_hz,
                         double bytes_per_sample);

/**
 * Median wall-clock milliseconds per call of `op` for each size, over
 * `reps` timed repetitions after `warmup` discarded calls. Monotone in
 * nothing: purely a measurement.
 */
std::vector<double> timing_probe(const std::function<void(int)>& op,
                                 const std::vector<int>& sizes, int reps = 30,
                                 int warmup = 3);

/// Chronological split position: floor(rows * fraction), clamped so both
/// sides are nonempty.
long long split_point(long long rows, double fraction);

}  // namespace triage
