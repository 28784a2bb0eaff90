#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "triage/dataset.hpp"

namespace triage {

/**
 * Three zero-mean Gaussian channels with covariance
 *   sigma2 * [[1, rho, 0], [rho, 1, 0], [0, 0, 1]]:
 * channels a and b correlated at rho, channel c independent. rho must lie
 * in (-1, 1), sigma2 > 0, n >= 1. Labels are all zero.
 */
Dataset gen_correlated_trio(double rho, double sigma2, long long n,
                            std::uint64_t seed);

/**
 * Grouped 40-channel benchmark stream.
 *
 * Channels 0-9 (group A) share pairwise correlation rho; channels 10-19
 * (group B) are independent; channels 20-39 (group C) are nuisance noise.
 * All are unit-variance Gaussian. A contiguous fault segment of
 * fault_fraction * n samples (placed across the 70/30 boundary so both
 * chronological splits see both classes) shifts the means of groups A and B
 * by +1.5 standard deviations; labels are 1 inside the segment.
 */
Dataset gen_group_dataset(double rho, long long n, double fault_fraction,
                          std::uint64_t seed);

/// Channel index sets of the grouped stream.
inline constexpr int kGroupSize = 10;
inline constexpr int kGroupChannels = 40;

/**
 * Variance regime change for adaptivity studies.
 *
 * d channels of zero-mean Gaussian noise. Before sample `onset`, the first
 * group (G1, d/4 channels clamped to [1, d/2]) has amplitude pre_amplitude;
 * from `onset` on, the disjoint second group (G2, same size) has amplitude
 * post_amplitude and G1 returns to baseline. Labels are 1 from onset on.
 * The post amplitude defaults higher than the pre amplitude so the new
 * regime outweighs accumulated history within a window, the way a real
 * fault transient dominates normal variation.
 */
Dataset gen_regime_change(int d, long long onset, long long n,
                          std::uint64_t seed, double pre_amplitude = 3.0,
                          double post_amplitude = 8.0);

/// G1/G2 for a given channel count (first = G1 start..end, second = G2).
int regime_group_size(int d);

/// What perturb() injects.
enum class PerturbKind {
  kNone,
  kJitter,      // per-channel integer time shift, uniform in [-jitter, +jitter]
  kPacketLoss,  // whole windows replaced by the last pre-window row
  kNoise,       // additive white Gaussian noise
  kClockDrift,  // per-channel integer time shift, uniform in [-drift, +drift]
  kCombined,    // jitter, then loss, then noise, then drift
};

std::string to_string(PerturbKind k);
PerturbKind perturb_kind_from_string(const std::string& s);

/**
 * Perturbation description. Magnitudes of zero make the matching kind an
 * exact identity. loss_fraction is the fraction of whole windows (length
 * loss_window) replaced by their last-known prior row; the replaced count
 * is round(fraction * windows).
 */
struct Perturbation {
  PerturbKind kind = PerturbKind::kNone;
  int jitter = 5;
  int drift = 3;
  double loss_fraction = 0.10;
  int loss_window = 50;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
};

/// Applies the perturbation to a copy of the value matrix.
Eigen::MatrixXd perturb(const Eigen::MatrixXd& values, const Perturbation& p);

/// Applies the perturbation to a copy of the dataset (labels untouched).
Dataset perturb(const Dataset& data, const Perturbation& p);

/**
 * Builds a synthetic dataset from a compact spec string:
 *   "groups:rho=0.6,n=4000,fault=0.3"
 *   "trio:rho=0.8,sigma2=1,n=20000"
 *   "regime:d=20,onset=300,n=1500"
 * Unknown names or keys throw std::invalid_argument. The seed parameter is
 * mixed into the generator so distinct evaluation seeds get fresh draws.
 */
Dataset make_synthetic(const std::string& spec, std::uint64_t seed);

}  // namespace triage
