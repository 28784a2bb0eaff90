// End-to-end acceptance checks for the streaming triage pipeline. Each check
// prints one [PASS]/[FAIL]/[SOFT-FAIL] line with the measured quantity; any
// hard [FAIL] makes the process exit nonzero. Soft checks cover quantities
// that depend on machine load or statistical margins rather than the
// implementation contract.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "triage/acquire.hpp"
#include "triage/baselines.hpp"
#include "triage/eval.hpp"
#include "triage/ipca.hpp"
#include "triage/rng.hpp"
#include "triage/scoring.hpp"
#include "triage/stream.hpp"
#include "triage/synth.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;
using namespace triage;

namespace {

int g_hard_failures = 0;

void report(const std::string& id, bool pass, bool hard,
            const std::string& detail) {
  const char* tag = pass ? "[PASS]     " : (hard ? "[FAIL]     " : "[SOFT-FAIL]");
  std::cout << tag << " " << id << ": " << detail << "\n";
  if (!pass && hard) ++g_hard_failures;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

// ---- 1. every allocation respects the budget and the floor ----------------

void check_budget_feasibility() {
  Rng rng(101);
  double worst_excess = -1e300;
  double worst_floor = 1e300;
  double worst_cap = -1e300;
  for (int rep = 0; rep < 1000; ++rep) {
    const int d = 1 + static_cast<int>(rng.uniform_int(0, 63));
    const double r_min = 0.25 * rng.uniform();
    const double budget = r_min + (1.0 - r_min) * (0.01 + 0.99 * rng.uniform());
    VectorXd s(d);
    for (int j = 0; j < d; ++j) s(j) = rng.uniform() + 1e-12;
    const VectorXd scores = normalize_l1(s);
    const RateVector r = allocate_rates(scores, budget, r_min);
    worst_excess = std::max(worst_excess, r.mean() - budget);
    worst_floor = std::min(worst_floor, r.values.minCoeff() - r_min);
    worst_cap = std::max(worst_cap, r.values.maxCoeff() - 1.0);
  }
  const bool pass =
      worst_excess <= 1e-9 && worst_floor >= -1e-12 && worst_cap <= 1e-12;
  report("01 budget-feasibility", pass, true,
         "1000 random allocations, worst mean excess " + fmt(worst_excess) +
             " (limit 1e-9), worst floor slack " + fmt(worst_floor) +
             ", worst cap excess " + fmt(worst_cap));
}

// ---- 2. importance scores on the correlated-trio eigenstructure -----------

void check_trio_importance() {
  const double rho = 0.8, sigma2 = 1.0;
  const Dataset ds = gen_correlated_trio(rho, sigma2, 20000, 1);

  auto scores_for_k = [&](int k) {
    IncrementalPca model(k);
    model.partial_fit(ds.values);
    return importance_from_state(model, true);
  };

  // Stated criterion: with k = 2 the independent channel's importance share
  // stays under 2%, and with k = 3 all three scores agree within 5%.
  //
  // The k = 2 clause cannot hold for this covariance: the spectrum is
  // sigma^2 * (1.8, 1.0, 0.2), so the independent channel's own axis is the
  // SECOND component and k = 2 retains it, giving that channel the largest
  // score (share ~ 1.0 / 2.8 = 0.357). The claimed behavior occurs at
  // k = 1, where the only retained component is the shared pair direction;
  // that share is printed for context. This check reports the k = 2 measure
  // against the stated limit rather than substituting the k = 1 result.
  const VectorXd s1 = scores_for_k(1);
  const VectorXd s2 = scores_for_k(2);
  const VectorXd s3 = scores_for_k(3);
  const double share1 = s1(2) / s1.sum();
  const double share2 = s2(2) / s2.sum();
  double worst_pair_gap = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      worst_pair_gap = std::max(
          worst_pair_gap, std::abs(s3(a) - s3(b)) / std::max(s3(a), s3(b)));
  const bool pass = share2 < 0.02 && worst_pair_gap < 0.05;
  report("02 trio-importance", pass, true,
         "k=2 independent-channel share " + fmt(share2) +
             " (limit 0.02; unattainable for this spectrum — the channel's "
             "axis is the 2nd component; at k=1 the share is " +
             fmt(share1) + "), k=3 worst pairwise gap " + fmt(worst_pair_gap) +
             " (limit 0.05)");
}

// ---- 3. smoothing half-life at lambda = 0.85 -------------------------------

void check_smoothing_halflife() {
  const int d = 4;
  VectorXd old_evidence = VectorXd::Zero(d);
  old_evidence(0) = 1.0;
  VectorXd new_evidence = VectorXd::Zero(d);
  new_evidence(1) = 1.0;

  VectorXd s = old_evidence;
  double w4 = 0.0, w5 = 0.0;
  for (int step = 1; step <= 5; ++step) {
    s = smooth_scores(s, new_evidence, 0.85, step);
    if (step == 4) w4 = s(0);
    if (step == 5) w5 = s(0);
  }
  const bool pass = std::abs(w4 - 0.52200625) <= 1e-6 &&
                    std::abs(w5 - 0.4437053125) <= 1e-6 && w4 > 0.5 &&
                    w5 < 0.5;
  report("03 smoothing-halflife", pass, true,
         "old-evidence weight after 4 windows " + fmt(w4) +
             " (expect 0.522006), after 5 windows " + fmt(w5) +
             " (expect 0.443705); crosses 1/2 at window 5");
}

// ---- 4. the incremental model matches batch PCA and converges -------------

MatrixXd batch_components(const MatrixXd& x, int k) {
  MatrixXd centered = x.rowwise() - x.colwise().mean();
  MatrixXd cov = centered.transpose() * centered;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
  MatrixXd v(k, x.cols());
  for (int i = 0; i < k; ++i)
    v.row(i) = es.eigenvectors().col(static_cast<int>(x.cols()) - 1 - i)
                   .transpose();
  return v;
}

double subspace_angle(const MatrixXd& a_rows, const MatrixXd& b_rows) {
  Eigen::JacobiSVD<MatrixXd> svd(a_rows * b_rows.transpose());
  const double c = std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0);
  return std::acos(c);
}

void check_model_oracle() {
  // Single batch: must match an independent eigendecomposition.
  Rng rng(7);
  MatrixXd x(80, 12);
  for (int t = 0; t < 80; ++t)
    for (int j = 0; j < 12; ++j) x(t, j) = (1.0 + 0.2 * j) * rng.gaussian();
  IncrementalPca model(5);
  model.partial_fit(x);
  const MatrixXd oracle = batch_components(x, 5);
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double direct = (model.components().row(i) - oracle.row(i))
                              .lpNorm<Eigen::Infinity>();
    const double flipped = (model.components().row(i) + oracle.row(i))
                               .lpNorm<Eigen::Infinity>();
    worst = std::max(worst, std::min(direct, flipped));
  }

  // Streaming on stationary data: the leading subspace settles near truth.
  double mean_angle = 0.0;
  const int seeds = 10, d = 10, k = 3, w = 50, windows = 50;
  VectorXd scale = VectorXd::Ones(d);
  scale(0) = 8;
  scale(1) = 6;
  scale(2) = 4;
  MatrixXd truth = MatrixXd::Zero(k, d);
  truth(0, 0) = truth(1, 1) = truth(2, 2) = 1.0;
  for (int s = 0; s < seeds; ++s) {
    Rng g(derive_seed(900, s));
    IncrementalPca m(k);
    for (int wi = 0; wi < windows; ++wi) {
      MatrixXd window(w, d);
      for (int t = 0; t < w; ++t)
        for (int j = 0; j < d; ++j) window(t, j) = scale(j) * g.gaussian();
      m.partial_fit(window);
    }
    mean_angle += subspace_angle(m.components(), truth) / seeds;
  }
  const bool pass = worst < 1e-6 && mean_angle < 0.05;
  report("04 model-oracle", pass, true,
         "single-batch max loading error " + fmt(worst) +
             " (limit 1e-6); mean subspace angle after 50 windows " +
             fmt(mean_angle) + " rad (limit 0.05)");
}

// ---- 5. reconstruction quality orders linear <= ffill <= zero --------------

void check_recon_ordering() {
  const int T = 4000, d = 4;
  int good = 0, total = 0;
  std::ostringstream detail;
  for (double budget : {0.1, 0.3, 0.5}) {
    int ok_seeds = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng g(derive_seed(500, seed));
      MatrixXd x(T, d);
      for (int j = 0; j < d; ++j) {
        const double period = 90.0 + 20.0 * j;
        const double phase = 6.28318530717958648 * g.uniform();
        for (int t = 0; t < T; ++t)
          x(t, j) = std::sin(6.28318530717958648 * t / period + phase) +
                    0.05 * g.gaussian();
      }
      std::vector<RateVector> log;
      for (int t = 0; t < T; t += 50)
        log.push_back(RateVector{VectorXd::Constant(d, budget)});
      const AcquisitionMask mask = sample_mask(log, 50, T, derive_seed(7, seed));
      auto mse = [&](ReconMethod m) {
        return (reconstruct(x, mask, m) - x).squaredNorm() / (T * d);
      };
      const double lin = mse(ReconMethod::kLinear);
      const double ff = mse(ReconMethod::kForwardFill);
      const double ze = mse(ReconMethod::kZero);
      if (lin <= ff && ff <= ze) ++ok_seeds;
    }
    good += ok_seeds;
    total += 10;
    detail << "B=" << budget << " " << ok_seeds << "/10  ";
  }
  const bool pass = good >= 27;  // at least 9 of 10 per budget on average
  report("05 recon-ordering", pass, true,
         detail.str() + "(require >= 27/30 overall)");
}

// ---- 6. faster forgetting reacts faster to a regime change ----------------

std::optional<long long> regime_reaction(double lambda, std::uint64_t seed) {
  const int d = 20, onset = 300, n = 1500, w = 50;
  const Dataset ds = gen_regime_change(d, onset, n, seed);
  TriageConfig cfg;
  cfg.k = 5;
  cfg.window = w;
  cfg.lambda = lambda;
  TriageStream stream(cfg);
  MatrixXd trace(n / w, d);
  for (int wi = 0; wi * w < n; ++wi) {
    stream.step(ds.values.middleRows(wi * w, w));
    trace.row(wi) = stream.smoothed_scores()->transpose();
  }
  return reaction_time(trace, onset / w, 5, 0.2);
}

void check_adaptivity() {
  long long worst_fast = -1;
  bool ordered = true;
  std::ostringstream detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto fast = regime_reaction(0.80, seed);
    const auto slow = regime_reaction(1.00, seed);
    const long long f = fast ? *fast : 1000000;
    const long long s = slow ? *slow : 1000000;
    worst_fast = std::max(worst_fast, f);
    if (f > s) ordered = false;
    detail << "seed " << seed << ": 0.80->" << (fast ? std::to_string(f) : "none")
           << " 1.00->" << (slow ? std::to_string(s) : "none") << "  ";
  }
  const bool pass = worst_fast <= 3 && ordered;
  report("06 adaptivity", pass, true,
         detail.str() + "(require max reaction at 0.80 <= 3 windows and "
                        "0.80 never slower than 1.00)");
}

// ---- 7. per-window cost scales sanely with channel count ------------------

double ms_per_window(int d, int reps) {
  TriageConfig cfg;
  cfg.k = 10;
  cfg.window = 50;
  TriageStream stream(cfg);
  Rng g(derive_seed(42, d));
  std::vector<MatrixXd> windows;
  for (int r = 0; r < reps + 3; ++r) {
    MatrixXd w(50, d);
    for (int t = 0; t < 50; ++t)
      for (int j = 0; j < d; ++j) w(t, j) = g.gaussian();
    windows.push_back(std::move(w));
  }
  std::vector<double> times;
  for (int r = 0; r < reps + 3; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    stream.step(windows[r]);
    const auto t1 = std::chrono::steady_clock::now();
    if (r >= 3)
      times.push_back(
          std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

void check_scaling() {
  const double t52 = ms_per_window(52, 30);
  const double t100 = ms_per_window(100, 30);
  const double t200 = ms_per_window(200, 30);
  const double ratio = t200 / t100;
  const bool ratio_ok = ratio >= 1.4 && ratio <= 3.0;
  report("07a scaling-ratio", ratio_ok, true,
         "median ms/window d=100: " + fmt(t100) + ", d=200: " + fmt(t200) +
             ", ratio " + fmt(ratio) + " (require within [1.4, 3.0])");
  report("07b absolute-speed", t52 < 5.0, false,
         "median ms/window at d=52: " + fmt(t52) + " (want < 5 ms)");
}

// ---- 8. component scores beat raw variance when structure is shared -------

double method_gap(double rho, std::uint64_t seed) {
  const Dataset ds = make_synthetic(
      "groups:rho=" + std::to_string(rho) + ",n=3000,fault=0.3", seed);
  SweepConfig cfg;  // stock hyperparameters; half bandwidth
  const EvalRow pca = run_cell(ds, "groups", Method::kPca, 0.5, seed, cfg);
  const EvalRow var = run_cell(ds, "groups", Method::kVariance, 0.5, seed, cfg);
  return pca.f1 - var.f1;
}

void check_correlation_advantage() {
  double hi = 0.0, lo = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    hi += method_gap(0.95, seed) / 5.0;
    lo += method_gap(0.20, seed) / 5.0;
  }
  report("08 correlation-advantage", hi > lo, false,
         "mean F1 gap (component - variance) at rho=0.95: " + fmt(hi) +
             ", at rho=0.20: " + fmt(lo) + " (want the first larger)");
}

// ---- 9. bandwidth cost arithmetic ------------------------------------------

void check_cost_benefit() {
  const CostBenefit cb = cost_benefit(0.5, 52, 1.0, 4.0);
  const bool pass = std::abs(cb.mib_full - 0.71) < 0.01 &&
                    std::abs(cb.mib_saved - 0.357) < 0.01;
  report("09 cost-benefit", pass, true,
         "hourly volume " + fmt(cb.mib_full) + " MiB (expect ~0.71), saved " +
             fmt(cb.mib_saved) + " MiB (expect ~0.357) at budget 0.5");
}

// ---- 10. the evaluation harness is bytewise reproducible -------------------

void check_reproducibility() {
  const DatasetProvider provider = [](std::uint64_t seed) {
    return make_synthetic("groups:rho=0.7,n=900,fault=0.3", seed);
  };
  SweepConfig serial;
  serial.triage.k = 5;
  serial.jobs = 1;
  SweepConfig parallel = serial;
  parallel.jobs = 8;
  const std::vector<Method> methods = {Method::kPca, Method::kUniform};
  const std::string a =
      pareto_sweep(provider, "groups", methods, {0.3}, {0, 1}, serial).to_csv();
  const std::string b =
      pareto_sweep(provider, "groups", methods, {0.3}, {0, 1}, parallel)
          .to_csv();
  const std::string c =
      pareto_sweep(provider, "groups", methods, {0.3}, {0, 1}, serial).to_csv();
  const bool pass = (a == b) && (a == c);
  report("10 reproducibility", pass, true,
         std::string("rerun identical: ") + (a == c ? "yes" : "NO") +
             ", 1 vs 8 workers identical: " + (a == b ? "yes" : "NO"));
}

// ---- 11. a full budget changes nothing --------------------------------------

void check_full_budget_identity() {
  const Dataset ds = make_synthetic("groups:rho=0.7,n=1200,fault=0.3", 3);
  SweepConfig cfg;
  cfg.triage.k = 5;
  const EvalRow row = run_cell(ds, "groups", Method::kPca, 1.0, 3, cfg);

  const long long split = split_point(ds.values.rows(), cfg.train_fraction);
  MatrixXd train = ds.values.topRows(split);
  MatrixXd test = ds.values.bottomRows(ds.values.rows() - split);
  auto [strain, stest] = standardize(train, test);
  const double reference =
      knn_f1(strain, ds.labels.head(split), stest,
             ds.labels.tail(ds.labels.size() - split), cfg.knn_k);
  const bool pass = row.f1 == reference && row.realized_bw == 1.0;
  report("11 full-budget-identity", pass, true,
         "triaged F1 at budget 1.0 = " + fmt(row.f1) + ", untriaged = " +
             fmt(reference) + " (must be exactly equal), realized rate " +
             fmt(row.realized_bw));
}

}  // namespace

int main() {
  std::cout << "acceptance checks\n-----------------\n";
  check_budget_feasibility();
  check_trio_importance();
  check_smoothing_halflife();
  check_model_oracle();
  check_recon_ordering();
  check_adaptivity();
  check_scaling();
  check_correlation_advantage();
  check_cost_benefit();
  check_reproducibility();
  check_full_budget_identity();
  std::cout << "-----------------\n";
  if (g_hard_failures > 0) {
    std::cout << g_hard_failures << " hard failure(s)\n";
    return 1;
  }
  std::cout << "all hard checks passed\n";
  return 0;
}
