#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "triage/scoring.hpp"

namespace triage {

/// Rate-allocation strategies the evaluation harness can run.
enum class Method {
  kPca,            // streaming component-based allocation
  kUniform,
  kVariance,
  kThreshold,
  kRandomDropout,
  kMutualInfo,
  kOgd,
  kSendOnDelta,    // temporal filter; bandwidth realized, not commanded
  kJoint,          // kPca rates combined with the send-on-delta rule
};

std::string to_string(Method m);
Method method_from_string(const std::string& s);

/**
 * Knobs for the baseline allocators. budget/r_min/window mirror
 * TriageConfig. bins is the histogram resolution of the mutual-information
 * baseline; learning_rate drives the online-gradient baseline; smoothing
 * applies the pipeline's lambda smoothing to the variance and threshold
 * baselines so comparisons hold the smoothing constant (disable to get the
 * raw per-window scores).
 */
struct BaselineConfig {
  Method method = Method::kUniform;
  double budget = 0.5;
  double r_min = 0.05;
  int window = 50;
  int bins = 10;
  double learning_rate = 0.05;
  bool smoothing = true;
};

/// Every channel at the budget rate.
RateVector uniform_rates(double budget, int d);

/// Eq-style allocation on per-channel window variances (no sharpening).
/// An all-zero variance vector falls back to uniform rates at the budget.
RateVector variance_rates(const Eigen::MatrixXd& window, double budget,
                          double r_min);

/// Same allocation on a precomputed (possibly smoothed) variance vector.
RateVector variance_rates_from_scores(const Eigen::VectorXd& variances,
                                      double budget, double r_min);

/**
 * Active/inactive split by a variance quantile.
 *
 * Channels strictly louder than the floor((1 - budget) * d)-th smallest
 * variance are active and split the budget (net of the floor paid to
 * inactive channels) equally, capped at 1; inactive channels get r_min. The
 * post-cap mean never exceeds the budget. Ties at the cut stay inactive;
 * when nothing clears it (a flat window), the maximum-variance channels
 * share the budget instead.
 */
RateVector threshold_rates(const Eigen::MatrixXd& window, double budget,
                           double r_min);

/// Quantile split on a precomputed (possibly smoothed) variance vector.
RateVector threshold_rates_from_scores(const Eigen::VectorXd& variances,
                                       double budget, double r_min);

/**
 * Keeps each channel outright with probability budget, drops it otherwise
 * (rate 0, below the floor by design). One draw per channel per run; the
 * realized mean rate matches the budget only in expectation.
 */
RateVector random_dropout_rates(double budget, int d, std::uint64_t seed);

/**
 * Label-supervised allocation: channel scores are plugin mutual information
 * (nats) between the channel quantized into `bins` equal-width bins and the
 * label sequence. Throws std::invalid_argument when labels hold a single
 * class. Constant channels score 0.
 */
RateVector mutual_info_rates(const Eigen::MatrixXd& values,
                             const Eigen::VectorXi& labels, double budget,
                             double r_min, int bins);

/**
 * One online-gradient update: rates + learning_rate * per_channel_error,
 * then projection onto the feasible set (clip to [r_min, 1], rescale the
 * above-floor mass toward mean == budget, re-cap at 1). A zero error vector
 * returns a feasible input unchanged.
 */
RateVector ogd_step(const RateVector& rates,
                    const Eigen::VectorXd& per_channel_error,
                    double learning_rate, double budget, double r_min);

}  // namespace triage
