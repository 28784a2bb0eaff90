#include "triage/stream.hpp"

#include <stdexcept>

namespace triage {

Eigen::VectorXd window_variances(const Eigen::MatrixXd& window) {
  const auto rows = window.rows();
  if (rows < 2) return Eigen::VectorXd::Zero(window.cols());
  const Eigen::RowVectorXd mean = window.colwise().mean();
  const Eigen::MatrixXd centered = window.rowwise() - mean;
  return centered.array().square().colwise().sum().transpose() /
         static_cast<double>(rows - 1);
}

TriageStream::TriageStream(const TriageConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.scorer == Scorer::kEnsemble) {
    models_.reserve(cfg_.ensemble_ks.size());
    for (int k : cfg_.ensemble_ks) models_.emplace_back(k);
  } else {
    models_.emplace_back(cfg_.k);
  }
}

RateVector TriageStream::step(const Eigen::MatrixXd& window) {
  for (auto& model : models_) model.partial_fit(window);

  Eigen::VectorXd raw;
  switch (cfg_.scorer) {
    case Scorer::kWeighted:
      raw = importance_from_state(models_.front(), true);
      break;
    case Scorer::kUnweighted:
      raw = importance_from_state(models_.front(), false);
      break;
    case Scorer::kHybrid:
      raw = importance_hybrid(importance_from_state(models_.front(), true),
                              window_variances(window), cfg_.alpha);
      break;
    case Scorer::kEnsemble:
      raw = ensemble_importance(models_);
      break;
  }

  smoothed_ = smooth_scores(smoothed_, normalize_l1(raw), cfg_.lambda,
                            windows_seen_);
  ++windows_seen_;

  return allocate_rates(sharpen(*smoothed_, cfg_.gamma), cfg_.budget,
                        cfg_.r_min);
}

}  // namespace triage
