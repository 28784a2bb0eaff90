#include "triage/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "triage/rng.hpp"
#include "triage/stream.hpp"

namespace triage {

std::string to_string(Method m) {
  switch (m) {
    case Method::kPca: return "pca";
    case Method::kUniform: return "uniform";
    case Method::kVariance: return "variance";
    case Method::kThreshold: return "threshold";
    case Method::kRandomDropout: return "dropout";
    case Method::kMutualInfo: return "mi";
    case Method::kOgd: return "ogd";
    case Method::kSendOnDelta: return "sod";
    case Method::kJoint: return "joint";
  }
  throw std::invalid_argument("to_string: bad Method value");
}

Method method_from_string(const std::string& s) {
  if (s == "pca") return Method::kPca;
  if (s == "uniform") return Method::kUniform;
  if (s == "variance") return Method::kVariance;
  if (s == "threshold") return Method::kThreshold;
  if (s == "dropout") return Method::kRandomDropout;
  if (s == "mi") return Method::kMutualInfo;
  if (s == "ogd") return Method::kOgd;
  if (s == "sod") return Method::kSendOnDelta;
  if (s == "joint") return Method::kJoint;
  throw std::invalid_argument(
      "unknown method '" + s +
      "' (expected pca, uniform, variance, threshold, dropout, mi, ogd, sod, "
      "or joint)");
}

RateVector uniform_rates(double budget, int d) {
  if (!(budget > 0.0 && budget <= 1.0))
    throw std::invalid_argument("uniform_rates: budget outside (0, 1]");
  if (d < 1)
    throw std::invalid_argument("uniform_rates: channel count must be positive");
  return {Eigen::VectorXd::Constant(d, budget)};
}

RateVector variance_rates_from_scores(const Eigen::VectorXd& variances,
                                      double budget, double r_min) {
  if (variances.size() > 0 && variances.minCoeff() < 0.0)
    throw std::invalid_argument("variance_rates: negative variance");
  if (variances.sum() <= 0.0)
    return uniform_rates(budget, static_cast<int>(variances.size()));
  return allocate_rates(normalize_l1(variances), budget, r_min);
}

RateVector variance_rates(const Eigen::MatrixXd& window, double budget,
                          double r_min) {
  return variance_rates_from_scores(window_variances(window), budget, r_min);
}

RateVector threshold_rates_from_scores(const Eigen::VectorXd& variances,
                                       double budget, double r_min) {
  const int d = static_cast<int>(variances.size());
  if (d < 1)
    throw std::invalid_argument("threshold_rates: empty variance vector");
  if (!(budget > 0.0 && budget <= 1.0))
    throw std::invalid_argument("threshold_rates: budget outside (0, 1]");
  if (!(r_min >= 0.0 && r_min < 1.0))
    throw std::invalid_argument("threshold_rates: r_min outside [0, 1)");
  if (budget <= r_min)
    throw std::invalid_argument("threshold_rates: budget must exceed r_min");

  RateVector out{Eigen::VectorXd::Constant(d, r_min)};
  std::vector<char> active(static_cast<size_t>(d), 0);
  const int idx = std::clamp(
      static_cast<int>(
          std::floor((1.0 - budget) * static_cast<double>(d) + 1e-9)),
      0, d);
  if (idx == 0) {
    std::fill(active.begin(), active.end(), 1);
  } else {
    std::vector<double> sorted(variances.data(), variances.data() + d);
    std::sort(sorted.begin(), sorted.end());
    // Active means strictly louder than the idx-th smallest variance; ties
    // at the cut stay inactive so a dominant channel is not diluted.
    const double cut = sorted[static_cast<size_t>(idx - 1)];
    int n_active = 0;
    for (int j = 0; j < d; ++j)
      if (variances(j) > cut) {
        active[static_cast<size_t>(j)] = 1;
        ++n_active;
      }
    // Everything tied at the top (e.g. a flat window): the loudest channels
    // share the budget instead of leaving it unassigned.
    if (n_active == 0) {
      const double top = variances.maxCoeff();
      for (int j = 0; j < d; ++j)
        if (variances(j) == top) active[static_cast<size_t>(j)] = 1;
    }
  }

  const int n_active = static_cast<int>(
      std::count(active.begin(), active.end(), char{1}));
  const int n_inactive = d - n_active;
  const double rate = std::min(
      1.0, (budget * d - r_min * n_inactive) / static_cast<double>(n_active));
  for (int j = 0; j < d; ++j)
    if (active[static_cast<size_t>(j)]) out.values(j) = rate;
  return out;
}

RateVector threshold_rates(const Eigen::MatrixXd& window, double budget,
                           double r_min) {
  return threshold_rates_from_scores(window_variances(window), budget, r_min);
}

RateVector random_dropout_rates(double budget, int d, std::uint64_t seed) {
  if (!(budget > 0.0 && budget <= 1.0))
    throw std::invalid_argument("random_dropout_rates: budget outside (0, 1]");
  if (d < 1)
    throw std::invalid_argument(
        "random_dropout_rates: channel count must be positive");
  Rng rng(derive_seed(seed, 0x64726f70ULL));
  RateVector out{Eigen::VectorXd(d)};
  for (int j = 0; j < d; ++j)
    out.values(j) = rng.uniform() < budget ? 1.0 : 0.0;
  return out;
}

namespace {

// Plugin mutual information (nats) between a quantized channel and the
// integer labels. Constant channels carry no information.
double channel_label_mi(const Eigen::VectorXd& x, const Eigen::VectorXi& labels,
                        int bins, int n_classes,
                        const std::map<int, int>& class_index) {
  const auto n = x.size();
  const double lo = x.minCoeff(), hi = x.maxCoeff();
  if (hi <= lo) return 0.0;

  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(bins, n_classes);
  for (Eigen::Index t = 0; t < n; ++t) {
    int b = static_cast<int>((x(t) - lo) / (hi - lo) * bins);
    b = std::min(b, bins - 1);
    joint(b, class_index.at(labels(t))) += 1.0;
  }
  joint /= static_cast<double>(n);

  const Eigen::VectorXd p_bin = joint.rowwise().sum();
  const Eigen::VectorXd p_class = joint.colwise().sum().transpose();
  double mi = 0.0;
  for (int b = 0; b < bins; ++b)
    for (int c = 0; c < n_classes; ++c) {
      const double p = joint(b, c);
      if (p > 0.0) mi += p * std::log(p / (p_bin(b) * p_class(c)));
    }
  return std::max(0.0, mi);
}

}  // namespace

RateVector mutual_info_rates(const Eigen::MatrixXd& values,
                             const Eigen::VectorXi& labels, double budget,
                             double r_min, int bins) {
  if (labels.size() != values.rows())
    throw std::invalid_argument(
        "mutual_info_rates: label count does not match row count");
  if (values.rows() < 1)
    throw std::invalid_argument("mutual_info_rates: empty series");
  if (bins < 2)
    throw std::invalid_argument("mutual_info_rates: need at least two bins");

  std::map<int, int> class_index;
  for (Eigen::Index t = 0; t < labels.size(); ++t)
    class_index.emplace(labels(t), static_cast<int>(class_index.size()));
  if (class_index.size() < 2)
    throw std::invalid_argument("mutual_info_rates: labels hold a single class");

  Eigen::VectorXd scores(values.cols());
  for (Eigen::Index j = 0; j < values.cols(); ++j)
    scores(j) = channel_label_mi(values.col(j), labels, bins,
                                 static_cast<int>(class_index.size()),
                                 class_index);
  if (scores.sum() <= 0.0)
    return uniform_rates(budget, static_cast<int>(values.cols()));
  return allocate_rates(normalize_l1(scores), budget, r_min);
}

RateVector ogd_step(const RateVector& rates,
                    const Eigen::VectorXd& per_channel_error,
                    double learning_rate, double budget, double r_min) {
  const auto d = rates.values.size();
  if (per_channel_error.size() != d)
    throw std::invalid_argument("ogd_step: error size does not match rates");
  if (!(budget > 0.0 && budget <= 1.0))
    throw std::invalid_argument("ogd_step: budget outside (0, 1]");
  if (!(r_min >= 0.0 && r_min < 1.0))
    throw std::invalid_argument("ogd_step: r_min outside [0, 1)");
  if (budget <= r_min)
    throw std::invalid_argument("ogd_step: budget must exceed r_min");

  Eigen::VectorXd r = (rates.values + learning_rate * per_channel_error)
                          .cwiseMax(r_min)
                          .cwiseMin(1.0);
  const Eigen::VectorXd excess = r.array() - r_min;
  const double excess_total = excess.sum();
  const double target = (budget - r_min) * static_cast<double>(d);
  // A point already on the budget (a zero-error update) passes through
  // unscaled; an all-floor point has no mass to move.
  if (excess_total > 0.0 &&
      std::abs(excess_total - target) > 1e-12 * static_cast<double>(d)) {
    r = (r_min + (excess * (target / excess_total)).array())
            .cwiseMin(1.0)
            .matrix();
  }
  return {r};
}

}  // namespace triage
