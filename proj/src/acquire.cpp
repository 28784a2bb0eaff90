#include "triage/acquire.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace triage {

double AcquisitionMask::keep_fraction() const {
  const auto cells = kept.size();
  if (cells == 0) return 0.0;
  return static_cast<double>(kept.count()) / static_cast<double>(cells);
}

AcquisitionMask sample_mask(const std::vector<RateVector>& rate_log,
                            int window_len, long long n_rows,
                            std::uint64_t seed) {
  if (window_len < 1)
    throw std::invalid_argument("sample_mask: window_len must be positive");
  if (n_rows < 1)
    throw std::invalid_argument("sample_mask: n_rows must be positive");
  if (rate_log.empty())
    throw std::invalid_argument("sample_mask: empty rate log");
  const auto d = rate_log.front().values.size();
  for (const auto& r : rate_log)
    if (r.values.size() != d)
      throw std::invalid_argument("sample_mask: inconsistent channel counts");
  const long long windows_needed = (n_rows + window_len - 1) / window_len;
  if (windows_needed > static_cast<long long>(rate_log.size()))
    throw std::invalid_argument("sample_mask: rate log does not cover n_rows");

  AcquisitionMask mask;
  mask.seed = seed;
  mask.kept.resize(n_rows, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
    for (long long t = 0; t < n_rows; ++t) {
      const double rate = rate_log[static_cast<size_t>(t / window_len)].values(j);
      mask.kept(t, j) = rng.uniform() < rate;
    }
  }
  mask.kept.row(0).setConstant(true);
  return mask;
}

ChannelSampler::ChannelSampler(std::uint64_t seed, int channel)
    : rng_(derive_seed(seed, static_cast<std::uint64_t>(channel))) {}

std::vector<bool> ChannelSampler::draw(double rate, long long count) {
  std::vector<bool> out(static_cast<size_t>(count));
  for (long long i = 0; i < count; ++i)
    out[static_cast<size_t>(i)] = rng_.uniform() < rate;
  return out;
}

Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& original,
                            const AcquisitionMask& mask, ReconMethod method) {
  if (mask.kept.rows() != original.rows() ||
      mask.kept.cols() != original.cols())
    throw std::invalid_argument("reconstruct: mask shape does not match data");

  const long long rows = original.rows();
  Eigen::MatrixXd out = original;
  for (Eigen::Index j = 0; j < original.cols(); ++j) {
    std::vector<long long> kept;
    for (long long t = 0; t < rows; ++t)
      if (mask.kept(t, j)) kept.push_back(t);
    if (kept.empty())
      throw std::invalid_argument("reconstruct: channel " + std::to_string(j) +
                                  " has no retained samples");

    if (method == ReconMethod::kZero) {
      for (long long t = 0; t < rows; ++t)
        if (!mask.kept(t, j)) out(t, j) = 0.0;
      continue;
    }

    // Leading gap: back-fill from the first retained value.
    for (long long t = 0; t < kept.front(); ++t)
      out(t, j) = original(kept.front(), j);
    // Interior gaps.
    for (size_t i = 0; i + 1 < kept.size(); ++i) {
      const long long a = kept[i], b = kept[i + 1];
      if (b == a + 1) continue;
      const double va = original(a, j), vb = original(b, j);
      for (long long t = a + 1; t < b; ++t) {
        if (method == ReconMethod::kLinear)
          out(t, j) = va + (vb - va) * static_cast<double>(t - a) /
                               static_cast<double>(b - a);
        else
          out(t, j) = va;
      }
    }
    // Trailing gap: hold the last retained value.
    for (long long t = kept.back() + 1; t < rows; ++t)
      out(t, j) = original(kept.back(), j);
  }
  return out;
}

AcquisitionMask send_on_delta(const Eigen::MatrixXd& series,
                              const Eigen::VectorXd& delta) {
  if (delta.size() != series.cols())
    throw std::invalid_argument(
        "send_on_delta: threshold count does not match channel count");
  if (delta.size() > 0 && delta.minCoeff() < 0.0)
    throw std::invalid_argument("send_on_delta: negative threshold");
  if (series.rows() < 1)
    throw std::invalid_argument("send_on_delta: empty series");

  AcquisitionMask mask;
  mask.kept.resize(series.rows(), series.cols());
  for (Eigen::Index j = 0; j < series.cols(); ++j) {
    double reference = series(0, j);
    mask.kept(0, j) = true;
    for (long long t = 1; t < series.rows(); ++t) {
      const bool send = std::abs(series(t, j) - reference) > delta(j);
      mask.kept(t, j) = send;
      if (send) reference = series(t, j);
    }
  }
  return mask;
}

}  // namespace triage
