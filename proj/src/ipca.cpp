#include "triage/ipca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace triage {

namespace {

// Orient each component so its largest-magnitude loading is positive; SVD
// sign choices are otherwise arbitrary and would break reproducibility.
void fix_component_signs(Eigen::MatrixXd& components) {
  for (int i = 0; i < components.rows(); ++i) {
    int arg = 0;
    components.row(i).cwiseAbs().maxCoeff(&arg);
    if (components(i, arg) < 0.0) components.row(i) *= -1.0;
  }
}

// Singular values this far below the leading one are numerical noise from
// rank-deficient stacks; pin them to zero so downstream weights ignore them.
void clamp_tiny_singular_values(Eigen::VectorXd& sv) {
  if (sv.size() == 0) return;
  const double cutoff = 1e-12 * sv.maxCoeff();
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) < cutoff) sv(i) = 0.0;
}

// Top-k right singular pairs of s through the smaller Gram matrix. The
// eigensolve runs on a min(m, d)-sized matrix, so the per-window cost stays
// linear in the channel count instead of inheriting a dense-SVD constant.
// Eigenvalues below 1e-12 of the leading one are rank noise (the Gram step
// squares the spectrum, so that is the resolution floor) and map to zero
// singular values.
void gram_svd_top_k(const Eigen::MatrixXd& s, int k,
                    Eigen::MatrixXd& components, Eigen::VectorXd& sv) {
  const Eigen::Index m = s.rows();
  const Eigen::Index d = s.cols();
  components.resize(k, d);
  sv.resize(k);

  if (m >= d) {
    const Eigen::MatrixXd gram = s.transpose() * s;  // d x d
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double lead = std::max(0.0, eig.eigenvalues().maxCoeff());
    for (int i = 0; i < k; ++i) {
      const Eigen::Index at = d - 1 - i;  // eigenvalues come back ascending
      const double lambda = eig.eigenvalues()(at);
      sv(i) = lambda > 1e-12 * lead ? std::sqrt(lambda) : 0.0;
      components.row(i) = eig.eigenvectors().col(at).transpose();
    }
  } else {
    const Eigen::MatrixXd gram = s * s.transpose();  // m x m
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double lead = std::max(0.0, eig.eigenvalues().maxCoeff());
    for (int i = 0; i < k; ++i) {
      const Eigen::Index at = m - 1 - i;
      const double lambda = eig.eigenvalues()(at);
      if (lambda > 1e-12 * lead) {
        sv(i) = std::sqrt(lambda);
        components.row(i) =
            (s.transpose() * eig.eigenvectors().col(at)).transpose() / sv(i);
      } else {
        sv(i) = 0.0;
        components.row(i).setZero();
      }
    }
  }
}

}  // namespace

IncrementalPca::IncrementalPca(int k) : k_(k) {
  if (k <= 0) throw std::invalid_argument("k must be positive");
}

void IncrementalPca::partial_fit(const Eigen::MatrixXd& window) {
  const long long m = window.rows();
  const int d = static_cast<int>(window.cols());
  if (m < 1) throw std::invalid_argument("window must have at least one row");
  if (!window.allFinite())
    throw std::invalid_argument("window holds non-finite values");

  if (n_seen_ == 0) {
    if (m < k_)
      throw std::invalid_argument("first window needs at least k rows");
    if (d < k_)
      throw std::invalid_argument("channel count must be at least k");

    const Eigen::VectorXd mu = window.colwise().mean();
    const Eigen::MatrixXd centered = window.rowwise() - mu.transpose();
    gram_svd_top_k(centered, k_, components_, singular_values_);
    mean_ = mu;
    d_ = d;
    n_seen_ = m;
  } else {
    if (d != d_)
      throw std::invalid_argument("window channel count changed mid-stream");

    const long long n = n_seen_;
    const Eigen::VectorXd batch_mu = window.colwise().mean();

    // Stack the scaled previous factorization, the newly centered rows, and
    // one mean-correction row; the truncated SVD of this stack is the
    // updated factorization of all rows seen so far.
    Eigen::MatrixXd stack(k_ + m + 1, d_);
    stack.topRows(k_) = singular_values_.asDiagonal() * components_;
    stack.middleRows(k_, m) = window.rowwise() - batch_mu.transpose();
    const double correction = std::sqrt(static_cast<double>(n) *
                                        static_cast<double>(m) /
                                        static_cast<double>(n + m));
    stack.bottomRows(1) = correction * (mean_ - batch_mu).transpose();

    gram_svd_top_k(stack, k_, components_, singular_values_);
    mean_ = (static_cast<double>(n) * mean_ +
             static_cast<double>(m) * batch_mu) /
            static_cast<double>(n + m);
    n_seen_ = n + m;
  }

  clamp_tiny_singular_values(singular_values_);
  fix_component_signs(components_);
}

Eigen::VectorXd IncrementalPca::component_variances() const {
  if (n_seen_ <= 1) return Eigen::VectorXd::Zero(k_);
  return singular_values_.array().square() /
         static_cast<double>(n_seen_ - 1);
}

int select_k_by_variance(const Eigen::VectorXd& spectrum, double threshold) {
  if (!(threshold > 0.0) || threshold > 1.0)
    throw std::invalid_argument("threshold must lie in (0, 1]");
  if (spectrum.size() == 0)
    throw std::invalid_argument("spectrum is empty");
  if ((spectrum.array() < 0.0).any())
    throw std::invalid_argument("spectrum holds a negative energy");
  const double total = spectrum.sum();
  if (total <= 0.0)
    throw std::invalid_argument("spectrum is all zero");

  std::vector<double> sorted(spectrum.data(), spectrum.data() + spectrum.size());
  std::sort(sorted.rbegin(), sorted.rend());
  double cumulative = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    cumulative += sorted[i];
    if (cumulative >= threshold * total - 1e-12 * total)
      return static_cast<int>(i) + 1;
  }
  return static_cast<int>(sorted.size());
}

}  // namespace triage
