#include "triage/scoring.hpp"

#include <cmath>
#include <stdexcept>

namespace triage {

Eigen::VectorXd normalize_l1(const Eigen::VectorXd& v) {
  if (v.size() == 0) return v;
  const double total = v.sum();
  if (total <= 0.0)
    return Eigen::VectorXd::Constant(v.size(), 1.0 / static_cast<double>(v.size()));
  return v / total;
}

Eigen::VectorXd importance_pca(const Eigen::MatrixXd& components,
                               const Eigen::VectorXd& weights, bool weighted) {
  if (weights.size() != components.rows())
    throw std::invalid_argument(
        "importance_pca: weight count does not match component count");
  if (weights.size() > 0 && weights.minCoeff() < 0.0)
    throw std::invalid_argument("importance_pca: negative component weight");

  const Eigen::MatrixXd sq = components.array().square();
  if (!weighted) return sq.colwise().sum().transpose();
  return sq.transpose() * weights;
}

Eigen::VectorXd importance_from_state(const IncrementalPca& state,
                                      bool weighted) {
  return importance_pca(state.components(), state.component_variances(),
                        weighted);
}

Eigen::VectorXd importance_hybrid(const Eigen::VectorXd& pca_scores,
                                  const Eigen::VectorXd& variances,
                                  double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("importance_hybrid: alpha outside [0, 1]");
  if (pca_scores.size() != variances.size())
    throw std::invalid_argument("importance_hybrid: size mismatch");
  if (pca_scores.sum() <= 0.0 && variances.sum() <= 0.0)
    throw std::invalid_argument(
        "importance_hybrid: both score vectors are all-zero");
  return alpha * normalize_l1(pca_scores) +
         (1.0 - alpha) * normalize_l1(variances);
}

Eigen::VectorXd smooth_scores(const std::optional<Eigen::VectorXd>& prev,
                              const Eigen::VectorXd& current, double lambda,
                              long long prev_windows) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("smooth_scores: lambda outside (0, 1]");
  if (std::abs(current.sum() - 1.0) > 1e-6)
    throw std::invalid_argument("smooth_scores: current is not L1-normalized");
  if (!prev) return current;
  if (prev->size() != current.size())
    throw std::invalid_argument("smooth_scores: size mismatch with previous");
  if (lambda == 1.0) {
    const double n = static_cast<double>(prev_windows);
    return (n * (*prev) + current) / (n + 1.0);
  }
  return lambda * (*prev) + (1.0 - lambda) * current;
}

Eigen::VectorXd sharpen(const Eigen::VectorXd& scores, double gamma) {
  if (!(gamma >= 1.0))
    throw std::invalid_argument("sharpen: gamma must be at least 1");
  if (scores.size() > 0 && scores.minCoeff() < 0.0)
    throw std::invalid_argument("sharpen: negative score");

  const double top = scores.size() ? scores.maxCoeff() : 0.0;
  if (top <= 0.0)
    return Eigen::VectorXd::Constant(scores.size(),
                                     1.0 / static_cast<double>(scores.size()));
  // Dividing by the max keeps the powered terms in [0, 1] for any gamma.
  const Eigen::VectorXd powered = (scores / top).array().pow(gamma);
  return normalize_l1(powered);
}

RateVector allocate_rates(const Eigen::VectorXd& sharpened, double budget,
                          double r_min) {
  if (!(budget > 0.0 && budget <= 1.0))
    throw std::invalid_argument("allocate_rates: budget outside (0, 1]");
  if (!(r_min >= 0.0 && r_min < 1.0))
    throw std::invalid_argument("allocate_rates: r_min outside [0, 1)");
  if (budget <= r_min)
    throw std::invalid_argument("allocate_rates: budget must exceed r_min");
  if (std::abs(sharpened.sum() - 1.0) > 1e-6)
    throw std::invalid_argument("allocate_rates: scores are not L1-normalized");

  const double d = static_cast<double>(sharpened.size());
  RateVector out;
  out.values = (Eigen::VectorXd::Constant(sharpened.size(), r_min) +
                sharpened * (budget - r_min) * d)
                   .cwiseMin(1.0);
  return out;
}

Eigen::VectorXd ensemble_importance(const std::vector<IncrementalPca>& states) {
  if (states.size() < 2)
    throw std::invalid_argument("ensemble_importance: need at least two models");
  const int d = states.front().dim();
  if (d == 0)
    throw std::invalid_argument("ensemble_importance: model is not fitted");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
  for (const auto& state : states) {
    if (state.dim() != d)
      throw std::invalid_argument(
          "ensemble_importance: channel counts do not match");
    acc += normalize_l1(importance_from_state(state));
  }
  return acc / static_cast<double>(states.size());
}

}  // namespace triage
