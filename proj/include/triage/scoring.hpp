#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "triage/ipca.hpp"

namespace triage {

/**
 * Per-channel sampling rates for one window.
 *
 * Produced by allocate_rates: each entry lies in [r_min, 1] and the mean
 * never exceeds the commanded budget (clipping at 1 can only lose mass).
 */
struct RateVector {
  Eigen::VectorXd values;

  double mean() const { return values.size() ? values.mean() : 0.0; }
};

/**
 * Channel importance from a component model.
 *
 * Weighted mode returns s_j = sum_i weights[i] * V(i,j)^2, unweighted mode
 * drops the weights (s_j = sum_i V(i,j)^2). components is k x d with
 * orthonormal rows; weights must be length k and nonnegative. Scores are
 * nonnegative and invariant to component sign flips.
 */
Eigen::VectorXd importance_pca(const Eigen::MatrixXd& components,
                               const Eigen::VectorXd& weights, bool weighted);

/// Weighted importance with the state's per-component variances as weights.
Eigen::VectorXd importance_from_state(const IncrementalPca& state,
                                      bool weighted = true);

/**
 * Blend of PCA importance and raw channel variance.
 *
 * Returns alpha * normalize(pca_scores) + (1 - alpha) * variances / sum,
 * which L1-sums to 1. A side that is all-zero contributes a uniform vector;
 * if both sides are all-zero the window is degenerate and
 * std::invalid_argument is thrown.
 */
Eigen::VectorXd importance_hybrid(const Eigen::VectorXd& pca_scores,
                                  const Eigen::VectorXd& variances,
                                  double alpha);

/**
 * Exponential smoothing of importance across windows.
 *
 * current must be L1-normalized. With no previous value the result is
 * current. For lambda < 1 the result is lambda * prev + (1 - lambda) *
 * current. lambda == 1.0 keeps a cumulative running mean, where
 * prev_windows is the number of windows already folded into prev.
 */
Eigen::VectorXd smooth_scores(const std::optional<Eigen::VectorXd>& prev,
                              const Eigen::VectorXd& current, double lambda,
                              long long prev_windows);

/**
 * Power-law sharpening: s_j^gamma / sum_i s_i^gamma.
 *
 * gamma >= 1; gamma == 1 is plain L1 normalization. An all-zero input (or
 * one that underflows entirely) maps to the uniform vector 1/d. Preserves
 * the argmax and, for gamma > 1, concentrates mass on it.
 */
Eigen::VectorXd sharpen(const Eigen::VectorXd& scores, double gamma);

/**
 * Budget-constrained rate allocation.
 *
 * sharpened must be L1-normalized. Pre-clip rates are
 *   r_j = r_min + sharpened_j * (budget - r_min) * d,
 * whose mean is exactly the budget; entries are then capped at 1, which can
 * only lower the mean. Throws std::invalid_argument when budget <= r_min,
 * budget is outside (0, 1], or r_min is outside [0, 1).
 */
RateVector allocate_rates(const Eigen::VectorXd& sharpened, double budget,
                          double r_min);

/**
 * Equal-weight mean of L1-normalized weighted importance across models.
 *
 * Requires at least two fitted states with matching channel counts. The
 * result L1-sums to 1.
 */
Eigen::VectorXd ensemble_importance(const std::vector<IncrementalPca>& states);

/// L1-normalizes a nonnegative vector; an all-zero vector maps to uniform.
Eigen::VectorXd normalize_l1(const Eigen::VectorXd& v);

}  // namespace triage
