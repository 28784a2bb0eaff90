#include "triage/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <vector>

#include "triage/rng.hpp"
#include "triage/synth.hpp"

namespace triage {

namespace {

// Seed-stream tags for the per-cell randomness.
constexpr std::uint64_t kMaskTag = 0x6d61736bULL;      // acquisition draws
constexpr std::uint64_t kDropoutTag = 0x64726f70ULL;   // dropout channel draw

struct VoteOutcome {
  Eigen::VectorXi predicted;
};

Eigen::VectorXi knn_predict(const Eigen::MatrixXd& train_x,
                            const Eigen::VectorXi& train_y,
                            const Eigen::MatrixXd& test_x, int k_nn) {
  const Eigen::Index n_train = train_x.rows();
  const Eigen::Index n_test = test_x.rows();

  const Eigen::VectorXd train_sq = train_x.rowwise().squaredNorm();
  const Eigen::VectorXd test_sq = test_x.rowwise().squaredNorm();
  // Pairwise squared distances through one matrix product.
  Eigen::MatrixXd dist = -2.0 * (test_x * train_x.transpose());
  dist.colwise() += test_sq;
  dist.rowwise() += train_sq.transpose();

  Eigen::VectorXi predicted(n_test);
  std::vector<int> order(static_cast<size_t>(n_train));
  for (Eigen::Index i = 0; i < n_test; ++i) {
    std::iota(order.begin(), order.end(), 0);
    const auto closer = [&](int a, int b) {
      const double da = dist(i, a), db = dist(i, b);
      return da < db || (da == db && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + k_nn, order.end(), closer);

    std::map<int, int> votes;
    for (int r = 0; r < k_nn; ++r) ++votes[train_y(order[static_cast<size_t>(r)])];
    int best_label = 0, best_count = -1;
    for (const auto& [label, count] : votes)
      if (count > best_count) {  // map iterates ascending: ties keep the
        best_label = label;      // smaller label
        best_count = count;
      }
    predicted(i) = best_label;
  }
  return predicted;
}

double f1_of_class(const Eigen::VectorXi& truth, const Eigen::VectorXi& pred,
                   int cls) {
  long long tp = 0, fp = 0, fn = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    const bool t = truth(i) == cls, p = pred(i) == cls;
    tp += t && p;
    fp += !t && p;
    fn += t && !p;
  }
  const double denom = static_cast<double>(2 * tp + fp + fn);
  return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

}  // namespace

double knn_f1(const Eigen::MatrixXd& train_x, const Eigen::VectorXi& train_y,
              const Eigen::MatrixXd& test_x, const Eigen::VectorXi& test_y,
              int k_nn) {
  if (train_x.rows() == 0 || test_x.rows() == 0)
    throw std::invalid_argument("knn_f1: empty split");
  if (train_y.size() != train_x.rows() || test_y.size() != test_x.rows())
    throw std::invalid_argument("knn_f1: label count does not match rows");
  if (train_x.cols() != test_x.cols())
    throw std::invalid_argument("knn_f1: feature dimensions do not match");
  if (k_nn < 1 || k_nn > train_x.rows())
    throw std::invalid_argument("knn_f1: k_nn outside [1, train rows]");

  std::set<int> train_classes;
  for (Eigen::Index i = 0; i < train_y.size(); ++i)
    train_classes.insert(train_y(i));
  if (train_classes.size() < 2)
    throw std::invalid_argument("knn_f1: train labels hold a single class");

  const Eigen::VectorXi pred = knn_predict(train_x, train_y, test_x, k_nn);

  std::set<int> classes = train_classes;
  for (Eigen::Index i = 0; i < test_y.size(); ++i) classes.insert(test_y(i));

  if (classes.size() == 2) {
    // Binary: score the event class (the nonzero / larger label).
    int positive = *classes.rbegin();
    for (int c : classes)
      if (c != 0) positive = c;
    return f1_of_class(test_y, pred, positive);
  }

  double weighted = 0.0;
  long long support_total = 0;
  for (int c : classes) {
    long long support = 0;
    for (Eigen::Index i = 0; i < test_y.size(); ++i) support += test_y(i) == c;
    weighted += static_cast<double>(support) * f1_of_class(test_y, pred, c);
    support_total += support;
  }
  return support_total == 0 ? 0.0 : weighted / static_cast<double>(support_total);
}

long long split_point(long long rows, double fraction) {
  if (rows < 2)
    throw std::invalid_argument("split_point: need at least two rows");
  const long long raw =
      static_cast<long long>(std::floor(static_cast<double>(rows) * fraction));
  return std::clamp<long long>(raw, 1, rows - 1);
}

const char* EvalReport::csv_header() {
  return "dataset,method,budget,seed,recon,f1,ms_per_window,commanded_bw,"
         "realized_bw";
}

std::string EvalReport::to_csv() const {
  std::vector<EvalRow> sorted = rows;
  std::sort(sorted.begin(), sorted.end(), [](const EvalRow& a, const EvalRow& b) {
    return std::make_tuple(a.dataset, static_cast<int>(a.method), a.budget,
                           a.seed) < std::make_tuple(b.dataset,
                                                     static_cast<int>(b.method),
                                                     b.budget, b.seed);
  });
  std::string out = csv_header();
  out += '\n';
  char buf[256];
  for (const EvalRow& r : sorted) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%llu,%s,%.6f,%.6f,%.6f,%.6f\n",
                  r.dataset.c_str(), to_string(r.method).c_str(), r.budget,
                  static_cast<unsigned long long>(r.seed),
                  to_string(r.recon).c_str(), r.f1, r.ms_per_window,
                  r.commanded_bw, r.realized_bw);
    out += buf;
  }
  return out;
}

BudgetAudit budget_audit(const std::vector<RateVector>& rate_log,
                         int window_len, const AcquisitionMask& mask) {
  if (window_len < 1)
    throw std::invalid_argument("budget_audit: window_len must be positive");
  const long long rows = mask.rows();
  const long long windows_needed = (rows + window_len - 1) / window_len;
  if (windows_needed > static_cast<long long>(rate_log.size()))
    throw std::invalid_argument("budget_audit: rate log does not cover mask");

  double commanded = 0.0;
  for (long long w = 0; w < windows_needed; ++w) {
    const long long len =
        std::min<long long>(window_len, rows - w * window_len);
    commanded += rate_log[static_cast<size_t>(w)].mean() *
                 static_cast<double>(len);
  }
  BudgetAudit audit;
  audit.commanded = commanded / static_cast<double>(rows);
  audit.realized = mask.keep_fraction();
  return audit;
}

CostBenefit cost_benefit(double budget, int channels, double rate_hz,
                         double bytes_per_sample) {
  if (channels < 1 || rate_hz <= 0.0 || bytes_per_sample <= 0.0)
    throw std::invalid_argument("cost_benefit: nonpositive stream parameters");
  const double bytes_per_hour =
      static_cast<double>(channels) * rate_hz * bytes_per_sample * 3600.0;
  CostBenefit cb;
  cb.mb_full = bytes_per_hour / 1e6;
  cb.mib_full = bytes_per_hour / 1048576.0;
  cb.mb_saved = (1.0 - budget) * cb.mb_full;
  cb.mib_saved = (1.0 - budget) * cb.mib_full;
  return cb;
}

std::optional<long long> reaction_time(const Eigen::MatrixXd& importance_trace,
                                       long long onset_window, int top_n,
                                       double change_fraction) {
  const long long windows = importance_trace.rows();
  const int d = static_cast<int>(importance_trace.cols());
  if (onset_window < 1 || onset_window >= windows)
    throw std::invalid_argument("reaction_time: onset_window outside the trace");
  if (top_n < 1 || top_n > d)
    throw std::invalid_argument("reaction_time: top_n outside [1, channels]");
  if (!(change_fraction >= 0.0 && change_fraction <= 1.0))
    throw std::invalid_argument("reaction_time: change_fraction outside [0, 1]");

  const auto top_set = [&](long long row) {
    std::vector<int> idx(static_cast<size_t>(d));
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + top_n, idx.end(),
                      [&](int a, int b) {
                        const double va = importance_trace(row, a);
                        const double vb = importance_trace(row, b);
                        return va > vb || (va == vb && a < b);
                      });
    return std::set<int>(idx.begin(), idx.begin() + top_n);
  };

  const std::set<int> reference = top_set(onset_window - 1);
  const double threshold = change_fraction * static_cast<double>(top_n) + 1e-9;
  for (long long tau = 0; onset_window + tau < windows; ++tau) {
    const std::set<int> now = top_set(onset_window + tau);
    int displaced = 0;
    for (int c : reference) displaced += now.count(c) == 0;
    if (static_cast<double>(displaced) > threshold) return tau;
  }
  return std::nullopt;
}

std::vector<double> timing_probe(const std::function<void(int)>& op,
                                 const std::vector<int>& sizes, int reps,
                                 int warmup) {
  if (reps < 1) throw std::invalid_argument("timing_probe: reps must be positive");
  std::vector<double> medians;
  medians.reserve(sizes.size());
  for (int size : sizes) {
    for (int i = 0; i < warmup; ++i) op(size);
    std::vector<double> ms(static_cast<size_t>(reps));
    for (int i = 0; i < reps; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      op(size);
      const auto t1 = std::chrono::steady_clock::now();
      ms[static_cast<size_t>(i)] =
          std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    std::sort(ms.begin(), ms.end());
    const size_t mid = ms.size() / 2;
    medians.push_back(ms.size() % 2 ? ms[mid]
                                    : 0.5 * (ms[mid - 1] + ms[mid]));
  }
  return medians;
}

namespace {

// Per-channel mean absolute hold error of one window under the mask block:
// the drop cost signal the online-gradient baseline feeds on.
Eigen::VectorXd hold_error(const Eigen::MatrixXd& block,
                           const std::vector<std::vector<bool>>& kept_cols,
                           Eigen::VectorXd& last_value, bool first_window) {
  const Eigen::Index d = block.cols();
  Eigen::VectorXd err = Eigen::VectorXd::Zero(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (long long t = 0; t < block.rows(); ++t) {
      const bool kept = (first_window && t == 0)
                            ? true
                            : kept_cols[static_cast<size_t>(j)][static_cast<size_t>(t)];
      if (kept)
        last_value(j) = block(t, j);
      else
        err(j) += std::abs(block(t, j) - last_value(j));
    }
    err(j) /= static_cast<double>(block.rows());
  }
  return err;
}

TriageConfig cell_triage_config(const SweepConfig& cfg, double budget, int d,
                                long long first_window_rows) {
  TriageConfig t = cfg.triage;
  t.budget = budget;
  const int k_cap = static_cast<int>(
      std::min<long long>(d, std::max<long long>(1, first_window_rows)));
  t.k = std::min(t.k, k_cap);
  for (int& ek : t.ensemble_ks) ek = std::min(ek, k_cap);
  return t;
}

}  // namespace

EvalRow run_cell(const Dataset& data, const std::string& dataset_name,
                 Method method, double budget, std::uint64_t seed,
                 const SweepConfig& cfg) {
  EvalRow row;
  row.dataset = dataset_name;
  row.method = method;
  row.budget = budget;
  row.seed = seed;
  row.recon = cfg.triage.recon;

  const long long rows = data.rows();
  const int d = data.cols();
  if (rows < 2) throw std::invalid_argument("run_cell: need at least two rows");

  if (!(budget > 0.0 && budget <= 1.0 + 1e-12))
    throw std::invalid_argument("run_cell: budget outside (0, 1]");

  const auto score = [&](const Eigen::MatrixXd& values) {
    const long long split = split_point(rows, cfg.train_fraction);
    const Eigen::VectorXi train_y = data.labels.head(split);
    const Eigen::VectorXi test_y = data.labels.tail(rows - split);
    // Unlabeled streams have nothing to detect: score 0 rather than refusing
    // the whole run.
    if ((train_y.array() == train_y(0)).all()) return 0.0;
    const Eigen::MatrixXd train = values.topRows(split);
    const Eigen::MatrixXd test = values.bottomRows(rows - split);
    auto [strain, stest] = standardize(train, test);
    return knn_f1(strain, train_y, stest, test_y, cfg.knn_k);
  };

  // At (or above) the full budget nothing is triaged: every sample is kept
  // and the detector sees the original stream.
  if (budget >= 1.0) {
    row.commanded_bw = 1.0;
    row.realized_bw = 1.0;
    row.f1 = score(data.values);
    return row;
  }

  if (budget <= cfg.triage.r_min)
    throw std::invalid_argument("run_cell: budget must exceed r_min");

  const int w = cfg.triage.window;
  const long long first_rows = std::min<long long>(w, rows);
  const TriageConfig tcfg = cell_triage_config(cfg, budget, d, first_rows);
  const std::uint64_t mask_seed = derive_seed(seed, kMaskTag);

  // Send-on-delta thresholds live in per-channel standard deviations so one
  // knob spans channels of any scale.
  const auto sod_mask = [&]() {
    Eigen::VectorXd delta(d);
    for (int j = 0; j < d; ++j) {
      const double mean = data.values.col(j).mean();
      const double var = (data.values.col(j).array() - mean).square().sum() /
                         static_cast<double>(rows - 1);
      delta(j) = cfg.sod_delta * std::sqrt(std::max(0.0, var));
    }
    return send_on_delta(data.values, delta);
  };

  if (method == Method::kSendOnDelta) {
    const AcquisitionMask mask = sod_mask();
    row.realized_bw = mask.keep_fraction();
    row.commanded_bw = row.realized_bw;  // nothing is commanded, only realized
    row.f1 = score(reconstruct(data.values, mask, tcfg.recon));
    return row;
  }

  // Rate-driven methods build the schedule window by window; acquisition
  // draws run through per-channel samplers so the assembled mask is
  // bit-identical to a one-shot draw over the finished schedule.
  const Method rate_method = method == Method::kJoint ? Method::kPca : method;
  std::vector<RateVector> rate_log;
  std::optional<TriageStream> stream;
  std::optional<Eigen::VectorXd> smoothed_variances;
  RateVector ogd_rates;
  RateVector dropout_rates;
  Eigen::VectorXd ogd_last = Eigen::VectorXd::Zero(d);
  std::optional<RateVector> mi_rates;

  switch (rate_method) {
    case Method::kPca:
      stream.emplace(tcfg);
      break;
    case Method::kOgd:
      ogd_rates = uniform_rates(budget, d);
      break;
    case Method::kRandomDropout:
      dropout_rates =
          random_dropout_rates(budget, d, derive_seed(seed, kDropoutTag));
      break;
    case Method::kMutualInfo:
      mi_rates = mutual_info_rates(data.values, data.labels, budget,
                                   tcfg.r_min, cfg.baseline.bins);
      break;
    default:
      break;
  }

  std::vector<ChannelSampler> samplers;
  samplers.reserve(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j) samplers.emplace_back(mask_seed, j);

  AcquisitionMask mask;
  mask.seed = mask_seed;
  mask.kept.resize(rows, d);

  const long long n_windows = (rows + w - 1) / w;
  long long window_index = 0;
  const auto t_begin = std::chrono::steady_clock::now();
  for (long long t0 = 0; t0 < rows; t0 += w, ++window_index) {
    const long long len = std::min<long long>(w, rows - t0);
    const Eigen::MatrixXd block = data.values.middleRows(t0, len);

    RateVector rates;
    switch (rate_method) {
      case Method::kPca:
        rates = stream->step(block);
        break;
      case Method::kUniform:
        rates = uniform_rates(budget, d);
        break;
      case Method::kVariance:
      case Method::kThreshold: {
        Eigen::VectorXd scores = window_variances(block);
        if (cfg.baseline.smoothing) {
          smoothed_variances = smooth_scores(
              smoothed_variances, normalize_l1(scores), tcfg.lambda,
              window_index);
          scores = *smoothed_variances;
        }
        rates = rate_method == Method::kVariance
                    ? variance_rates_from_scores(scores, budget, tcfg.r_min)
                    : threshold_rates_from_scores(scores, budget, tcfg.r_min);
        break;
      }
      case Method::kRandomDropout:
        rates = dropout_rates;
        break;
      case Method::kMutualInfo:
        rates = *mi_rates;
        break;
      case Method::kOgd:
        rates = ogd_rates;
        break;
      default:
        throw std::invalid_argument("run_cell: unsupported method");
    }
    rate_log.push_back(rates);

    std::vector<std::vector<bool>> kept_cols(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j) {
      kept_cols[static_cast<size_t>(j)] =
          samplers[static_cast<size_t>(j)].draw(rates.values(j), len);
      for (long long t = 0; t < len; ++t)
        mask.kept(t0 + t, j) = kept_cols[static_cast<size_t>(j)][static_cast<size_t>(t)];
    }

    if (rate_method == Method::kOgd) {
      const Eigen::VectorXd err =
          hold_error(block, kept_cols, ogd_last, t0 == 0);
      ogd_rates = ogd_step(ogd_rates, err, cfg.baseline.learning_rate, budget,
                           tcfg.r_min);
    }
  }
  mask.kept.row(0).setConstant(true);
  const auto t_end = std::chrono::steady_clock::now();

  if (method == Method::kJoint) {
    const AcquisitionMask sod = sod_mask();
    mask.kept = (mask.kept.array() && sod.kept.array()).matrix();
    mask.kept.row(0).setConstant(true);
  }

  const BudgetAudit audit = budget_audit(rate_log, w, mask);
  row.commanded_bw = audit.commanded;
  row.realized_bw = audit.realized;
  row.f1 = score(reconstruct(data.values, mask, tcfg.recon));
  if (cfg.measure_time)
    row.ms_per_window =
        std::chrono::duration<double, std::milli>(t_end - t_begin).count() /
        static_cast<double>(n_windows);
  return row;
}

EvalReport pareto_sweep(const DatasetProvider& provider,
                        const std::string& dataset_name,
                        const std::vector<Method>& methods,
                        const std::vector<double>& budgets,
                        const std::vector<std::uint64_t>& seeds,
                        const SweepConfig& cfg) {
  if (methods.empty() || budgets.empty() || seeds.empty())
    throw std::invalid_argument("pareto_sweep: empty grid axis");
  for (double b : budgets) {
    if (!(b > 0.0 && b <= 1.0))
      throw std::invalid_argument("pareto_sweep: budget outside (0, 1]");
    if (b < 1.0 && b <= cfg.triage.r_min)
      throw std::invalid_argument("pareto_sweep: budget must exceed r_min");
  }

  struct Cell {
    Method method;
    double budget;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (Method m : methods)
    for (double b : budgets)
      for (std::uint64_t s : seeds) cells.push_back({m, b, s});

  EvalReport report;
  report.rows.resize(cells.size());

  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    for (size_t i = 0; i < cells.size(); ++i) {
      const Dataset data = provider(cells[i].seed);
      report.rows[i] = run_cell(data, dataset_name, cells[i].method,
                                cells[i].budget, cells[i].seed, cfg);
    }
  } else {
    std::atomic<size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    const auto worker = [&] {
      while (true) {
        const size_t i = next.fetch_add(1);
        if (i >= cells.size()) return;
        try {
          const Dataset data = provider(cells[i].seed);
          report.rows[i] = run_cell(data, dataset_name, cells[i].method,
                                    cells[i].budget, cells[i].seed, cfg);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    const int n_threads =
        static_cast<int>(std::min<size_t>(static_cast<size_t>(jobs), cells.size()));
    pool.reserve(static_cast<size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::sort(report.rows.begin(), report.rows.end(),
            [](const EvalRow& a, const EvalRow& b) {
              return std::make_tuple(a.dataset, static_cast<int>(a.method),
                                     a.budget, a.seed) <
                     std::make_tuple(b.dataset, static_cast<int>(b.method),
                                     b.budget, b.seed);
            });
  return report;
}

}  // namespace triage
