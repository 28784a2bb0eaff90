#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "triage/config.hpp"
#include "triage/ipca.hpp"
#include "triage/scoring.hpp"

namespace triage {

/**
 * Streaming rate allocator: one step per window.
 *
 * Each step folds the window into the component model, scores channels,
 * smooths the scores across windows, sharpens them, and allocates rates
 * under the budget. Feeding identical windows drives the state to a fixed
 * point. The object is a plain value; copies evolve independently.
 */
class TriageStream {
 public:
  explicit TriageStream(const TriageConfig& cfg);

  /// Processes one window (rows x d, rows >= 1; first window rows >= k) and
  /// returns the rates that govern acquisition for that window.
  RateVector step(const Eigen::MatrixXd& window);

  /// Smoothed importance after the last step; empty before the first.
  const std::optional<Eigen::VectorXd>& smoothed_scores() const {
    return smoothed_;
  }

  /// Number of windows processed.
  long long windows_seen() const { return windows_seen_; }

  const TriageConfig& config() const { return cfg_; }

  /// Component models: one entry unless the scorer is kEnsemble.
  const std::vector<IncrementalPca>& models() const { return models_; }

 private:
  TriageConfig cfg_;
  std::vector<IncrementalPca> models_;
  std::optional<Eigen::VectorXd> smoothed_;
  long long windows_seen_ = 0;
};

/// Per-channel sample variance of a window's rows (denominator rows - 1;
/// zero when the window has a single row).
Eigen::VectorXd window_variances(const Eigen::MatrixXd& window);

}  // namespace triage
