#pragma once

#include <Eigen/Dense>

namespace triage {

/**
 * Streaming principal component tracker.
 *
 * Maintains the top-k components of everything seen so far using the
 * mean-corrected sequential Karhunen-Loeve update: each batch is folded in
 * by stacking the scaled previous factorization, the centered batch, and a
 * mean-correction row, then truncating the SVD of that stack back to k.
 * After the first batch the state equals the batch truncated SVD of the
 * centered window.
 *
 * State is a plain value: copyable, comparable by field, no hidden caches.
 */
class IncrementalPca {
 public:
  /// k is the number of components to retain; must be positive.
  explicit IncrementalPca(int k);

  /**
   * Folds one window of rows into the model.
   *
   * window is rows x d, rows in time order. The first call fixes d and
   * requires rows >= k and d >= k; later calls require matching d and
   * rows >= 1. Non-finite values are rejected.
   */
  void partial_fit(const Eigen::MatrixXd& window);

  /// k x d matrix with orthonormal rows; row i is component i. Each row is
  /// sign-fixed so its largest-magnitude entry is positive.
  const Eigen::MatrixXd& components() const { return components_; }

  /// Length-k, nonnegative, nonincreasing. Values below 1e-12 of the largest
  /// are clamped to zero.
  const Eigen::VectorXd& singular_values() const { return singular_values_; }

  /// Per-component variance estimates (squared singular values divided by
  /// n_seen - 1); proportional to covariance eigenvalues. Zero until more
  /// than one row has been seen.
  Eigen::VectorXd component_variances() const;

  /// Running mean of all rows seen.
  const Eigen::VectorXd& mean() const { return mean_; }

  long long n_seen() const { return n_seen_; }
  int k() const { return k_; }
  /// Channel count; 0 before the first partial_fit.
  int dim() const { return d_; }

 private:
  int k_ = 0;
  int d_ = 0;
  long long n_seen_ = 0;
  Eigen::MatrixXd components_;       // k x d
  Eigen::VectorXd singular_values_;  // k
  Eigen::VectorXd mean_;             // d
};

/**
 * Smallest k whose top-k spectrum mass reaches the given fraction.
 *
 * spectrum holds nonnegative energies (squared singular values); entries are
 * ranked descending before the cumulative fraction is taken. threshold must
 * lie in (0, 1]. Throws std::invalid_argument on an all-zero spectrum, a
 * negative entry, or a threshold outside the range.
 */
int select_k_by_variance(const Eigen::VectorXd& spectrum, double threshold);

}  // namespace triage
