#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace triage::props {

/// Outcome of one checked property.
struct PropertyResult {
  std::string name;
  bool pass = false;
  std::string measured;  // human-readable key figures
};

/// Allocation keeps the budget: random (d, budget, r_min, scores) draws;
/// pre-clip mean == budget within 1e-9 and post-clip mean <= budget + 1e-9.
PropertyResult check_budget_feasibility(std::uint64_t seed, int cases = 1000);

/// Correlated-pair geometry on the trio stream: with k = 2 the pair scores
/// sigma^2 (1 + rho) / 2 each and the independent channel sigma^2, within 2%
/// relative error; with k = 3 every channel recovers sigma^2 within 5%.
/// The default n keeps the sample noise of the empirical eigenvalues
/// (~sqrt(2/n)) several times below the tightest tolerance.
PropertyResult check_trio_eigenstructure(std::uint64_t seed,
                                         long long n = 200000);

/// Exponential smoothing at lambda = 0.85 halves a step gap between windows
/// 4 and 5 (0.85^4 > 0.5 > 0.85^5), and the decay is exactly geometric.
PropertyResult check_smoothing_halflife();

/// One batch matches a direct eigendecomposition oracle within 1e-6, and 50
/// stationary windows land within 0.05 rad of the true leading subspace
/// (10-seed mean principal angle).
PropertyResult check_ipca_oracle(std::uint64_t seed);

/// Linear < forward-fill < zero reconstruction error on sampled sinusoids
/// in at least 9 of 10 seeds at budgets 0.1 / 0.3 / 0.5.
PropertyResult check_recon_ordering(std::uint64_t seed);

/// Single-step-gap reconstruction error stays within 1.1x of
/// (1 - rate) * mean squared step for forward fill on i.i.d. Gaussian
/// increments (10 seeds).
PropertyResult check_recon_bound(std::uint64_t seed);

/// Regime change: reaction within 3 windows at lambda = 0.8 (max over 5
/// seeds) and never slower than lambda = 1.0 on the same seed.
PropertyResult check_adaptivity(std::uint64_t seed);

/// Smoothed scores on stationary data move less than 1e-3 (L1) between
/// consecutive windows within 100 windows, averaged over 10 seeds.
PropertyResult check_score_convergence(std::uint64_t seed);

/// All named checks in a stable order; `only` filters by substring.
std::vector<PropertyResult> run_all(std::uint64_t seed,
                                    const std::string& only = "");

}  // namespace triage::props
