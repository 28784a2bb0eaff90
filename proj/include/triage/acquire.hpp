#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "triage/config.hpp"
#include "triage/rng.hpp"
#include "triage/scoring.hpp"

namespace triage {

/**
 * Boolean keep/drop decision per (sample, channel).
 *
 * kept(t, j) is true when sample t of channel j was retained. Row 0 is
 * always all-true so every channel has an anchor for reconstruction.
 */
struct AcquisitionMask {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> kept;
  std::uint64_t seed = 0;

  long long rows() const { return kept.rows(); }
  long long cols() const { return kept.cols(); }
  /// Fraction of true cells.
  double keep_fraction() const;
};

/**
 * Draws a Bernoulli mask from a per-window rate schedule.
 *
 * rate_log holds one RateVector per window; sample t falls in window
 * t / window_len. Each channel draws from its own stream derived from
 * (seed, channel), in time order, so processing channels in parallel or
 * serially yields identical masks and a channel's draws do not depend on
 * the other channels' rates. Row 0 is forced true after drawing.
 */
AcquisitionMask sample_mask(const std::vector<RateVector>& rate_log,
                            int window_len, long long n_rows,
                            std::uint64_t seed);

/**
 * Stateful single-channel mask stream: the same draws sample_mask would
 * make for one channel, produced window by window. Lets a streaming loop
 * build the mask incrementally while remaining bit-identical to a one-shot
 * sample_mask over the finished rate log.
 */
class ChannelSampler {
 public:
  ChannelSampler(std::uint64_t seed, int channel);
  /// Draws keep decisions for the next `count` samples at the given rate.
  std::vector<bool> draw(double rate, long long count);

 private:
  Rng rng_;
};

/**
 * Fills dropped samples so every (t, j) has a value.
 *
 * kLinear interpolates between neighboring retained samples, back-fills a
 * leading gap from the first retained value, and holds the last retained
 * value through a trailing gap. kForwardFill holds the last retained value
 * and back-fills a leading gap. kZero writes 0.0. Every channel must have
 * at least one retained sample; otherwise std::invalid_argument names the
 * channel. An all-true mask returns the input bit-exactly.
 */
Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& original,
                            const AcquisitionMask& mask, ReconMethod method);

/**
 * Change-triggered temporal filter.
 *
 * Sample t of channel j is retained when |x_t(j) - last_transmitted(j)|
 * exceeds delta(j); the first sample is always retained and becomes the
 * initial reference. delta entries must be nonnegative. Returns a mask
 * (seedless: the rule is deterministic).
 */
AcquisitionMask send_on_delta(const Eigen::MatrixXd& series,
                              const Eigen::VectorXd& delta);

}  // namespace triage
