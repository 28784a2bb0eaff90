#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "triage/baselines.hpp"
#include "triage/rng.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;
using namespace triage;

namespace {

// Alternating +/-a rows: sample mean 0, variance proportional to a^2, so
// channel variance ratios are exact regardless of the w/(w-1) factor.
MatrixXd alternating_window(const std::vector<double>& amplitudes, int rows) {
  MatrixXd m(rows, static_cast<int>(amplitudes.size()));
  for (int t = 0; t < rows; ++t)
    for (size_t j = 0; j < amplitudes.size(); ++j)
      m(t, static_cast<int>(j)) = (t % 2 ? -1.0 : 1.0) * amplitudes[j];
  return m;
}

}  // namespace

TEST_CASE("uniform_rates pins every channel at the budget") {
  const RateVector r = uniform_rates(0.3, 5);
  CHECK(r.values.size() == 5);
  for (int j = 0; j < 5; ++j) CHECK(r.values(j) == doctest::Approx(0.3));
  CHECK_THROWS_AS(uniform_rates(0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(uniform_rates(1.1, 5), std::invalid_argument);
  CHECK_THROWS_AS(uniform_rates(0.5, 0), std::invalid_argument);
}

TEST_CASE("variance_rates allocates by variance share") {
  // Variances in ratio 4:1 normalize to (0.8, 0.2):
  // r = 0.05 + share * (0.5 - 0.05) * 2 = (0.77, 0.23).
  const MatrixXd window = alternating_window({2.0, 1.0}, 50);
  const RateVector r = variance_rates(window, 0.5, 0.05);
  CHECK(r.values(0) == doctest::Approx(0.77).epsilon(1e-12));
  CHECK(r.values(1) == doctest::Approx(0.23).epsilon(1e-12));
  CHECK(r.mean() == doctest::Approx(0.5).epsilon(1e-12));

  SUBCASE("equal variances split evenly") {
    const RateVector even = variance_rates(alternating_window({3, 3, 3}, 40),
                                           0.4, 0.05);
    for (int j = 0; j < 3; ++j)
      CHECK(even.values(j) == doctest::Approx(0.4).epsilon(1e-12));
  }
  SUBCASE("constant window falls back to uniform") {
    const MatrixXd flat = MatrixXd::Constant(30, 4, 2.5);
    const RateVector fb = variance_rates(flat, 0.6, 0.05);
    for (int j = 0; j < 4; ++j)
      CHECK(fb.values(j) == doctest::Approx(0.6).epsilon(1e-12));
  }
}

TEST_CASE("threshold_rates splits the budget among active channels") {
  // Variances proportional to (4, 3, 2, 1) at budget 0.5: the top half is
  // active; each active channel gets (0.5*4 - 0.05*2) / 2 = 0.95.
  const MatrixXd window =
      alternating_window({2.0, std::sqrt(3.0), std::sqrt(2.0), 1.0}, 60);
  const RateVector r = threshold_rates(window, 0.5, 0.05);
  CHECK(r.values(0) == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(r.values(1) == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(r.values(2) == doctest::Approx(0.05));
  CHECK(r.values(3) == doctest::Approx(0.05));
  CHECK(r.mean() <= 0.5 + 1e-12);

  SUBCASE("full budget keeps every channel at rate one") {
    const RateVector full = threshold_rates(window, 1.0, 0.05);
    for (int j = 0; j < 4; ++j) CHECK(full.values(j) == doctest::Approx(1.0));
  }
  SUBCASE("all-equal variances activate everyone at the budget") {
    const RateVector even =
        threshold_rates(alternating_window({2, 2, 2, 2}, 40), 0.5, 0.05);
    for (int j = 0; j < 4; ++j)
      CHECK(even.values(j) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("active rates cap at one without exceeding the budget") {
    // d = 10, one dominant channel, generous budget: the lone active
    // channel saturates at 1 and the mean stays under the budget.
    std::vector<double> amps(10, 1.0);
    amps[0] = 50.0;
    const RateVector capped =
        threshold_rates(alternating_window(amps, 40), 0.9, 0.05);
    CHECK(capped.values(0) == doctest::Approx(1.0));
    CHECK(capped.mean() <= 0.9 + 1e-12);
  }
}

TEST_CASE("random_dropout_rates keeps channels outright or not at all") {
  const RateVector all = random_dropout_rates(1.0, 6, 3);
  for (int j = 0; j < 6; ++j) CHECK(all.values(j) == 1.0);

  const RateVector a = random_dropout_rates(0.5, 20, 11);
  const RateVector b = random_dropout_rates(0.5, 20, 11);
  CHECK((a.values - b.values).lpNorm<Eigen::Infinity>() == 0.0);
  for (int j = 0; j < 20; ++j)
    CHECK((a.values(j) == 0.0 || a.values(j) == 1.0));

  // Keep probability per channel matches the budget across many seeds.
  const int trials = 2000, d = 4;
  const double budget = 0.3;
  Eigen::VectorXd kept = Eigen::VectorXd::Zero(d);
  for (int s = 0; s < trials; ++s)
    kept += random_dropout_rates(budget, d, derive_seed(1000, s)).values;
  for (int j = 0; j < d; ++j) {
    const double frac = kept(j) / trials;
    CHECK(std::abs(frac - budget) <
          3.0 * std::sqrt(budget * (1 - budget) / trials));
  }
}

TEST_CASE("mutual_info_rates rewards label-dependent channels") {
  const int n = 600;
  VectorXi labels(n);
  MatrixXd x(n, 3);
  Rng rng(5);
  for (int t = 0; t < n; ++t) {
    labels(t) = (t % 2 == 0) ? 0 : 1;
    x(t, 0) = labels(t);                    // perfectly informative
    x(t, 1) = rng.gaussian();               // independent
    x(t, 2) = 4.2;                          // constant: zero information
  }
  const RateVector r = mutual_info_rates(x, labels, 0.5, 0.05, 10);
  CHECK(r.values(0) > r.values(1));
  CHECK(r.values(0) > r.values(2));
  CHECK(r.values(0) > 0.9);
  CHECK(r.mean() <= 0.5 + 1e-9);

  SUBCASE("single-class labels are rejected") {
    CHECK_THROWS_AS(mutual_info_rates(x, VectorXi::Zero(n), 0.5, 0.05, 10),
                    std::invalid_argument);
  }
  SUBCASE("informative beats noise in at least 95 of 100 seeds") {
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng g(derive_seed(2000, seed));
      const int m = 500;
      VectorXi y(m);
      MatrixXd v(m, 2);
      for (int t = 0; t < m; ++t) {
        y(t) = (g.uniform() < 0.5) ? 0 : 1;
        v(t, 0) = y(t) + 0.5 * g.gaussian();
        v(t, 1) = g.gaussian();
      }
      const RateVector rr = mutual_info_rates(v, y, 0.5, 0.05, 10);
      if (rr.values(0) > rr.values(1)) ++wins;
    }
    CHECK(wins >= 95);
  }
}

TEST_CASE("ogd_step follows the error signal under projection") {
  SUBCASE("zero error leaves a feasible point unchanged") {
    RateVector r{VectorXd(2)};
    r.values << 0.7, 0.3;
    const RateVector out =
        ogd_step(r, VectorXd::Zero(2), 0.05, 0.5, 0.05);
    CHECK(out.values(0) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(out.values(1) == doctest::Approx(0.3).epsilon(1e-14));
  }
  SUBCASE("error concentrated on one channel raises its rate") {
    RateVector r{VectorXd::Constant(4, 0.5)};
    VectorXd err = VectorXd::Zero(4);
    err(0) = 2.0;
    const RateVector out = ogd_step(r, err, 0.05, 0.5, 0.05);
    CHECK(out.values(0) > 0.5);
    for (int j = 1; j < 4; ++j) CHECK(out.values(j) < 0.5);
    CHECK(out.mean() == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("projection keeps random updates feasible") {
    Rng rng(9);
    for (int rep = 0; rep < 300; ++rep) {
      const int d = 2 + static_cast<int>(rng.uniform_int(0, 10));
      RateVector r{VectorXd(d)};
      for (int j = 0; j < d; ++j)
        r.values(j) = 0.05 + 0.95 * rng.uniform();
      VectorXd err(d);
      for (int j = 0; j < d; ++j) err(j) = 4.0 * (rng.uniform() - 0.3);
      const RateVector out = ogd_step(r, err, 0.1, 0.5, 0.05);
      CHECK(out.mean() <= 0.5 + 1e-9);
      CHECK(out.values.minCoeff() >= 0.05 - 1e-12);
      CHECK(out.values.maxCoeff() <= 1.0 + 1e-12);
    }
  }
  SUBCASE("all-floor input stays at the floor") {
    RateVector r{VectorXd::Constant(3, 0.05)};
    const RateVector out = ogd_step(r, VectorXd::Zero(3), 0.05, 0.5, 0.05);
    for (int j = 0; j < 3; ++j) CHECK(out.values(j) == doctest::Approx(0.05));
  }
}

TEST_CASE("every allocator respects the budget and floor contracts") {
  Rng rng(31);
  const int d = 12;
  MatrixXd window(40, d);
  for (int t = 0; t < 40; ++t)
    for (int j = 0; j < d; ++j)
      window(t, j) = (1.0 + j) * rng.gaussian();

  const double budget = 0.4, r_min = 0.05;
  std::vector<RateVector> outputs = {
      uniform_rates(budget, d),
      variance_rates(window, budget, r_min),
      threshold_rates(window, budget, r_min),
  };
  for (const auto& r : outputs) {
    CHECK(r.values.size() == d);
    CHECK(r.mean() <= budget + 1e-9);
    CHECK(r.values.minCoeff() >= r_min - 1e-12);
    CHECK(r.values.maxCoeff() <= 1.0 + 1e-12);
  }

  // Random dropout promises the budget only in expectation and drops
  // channels below the floor by construction; check the binomial band.
  double mean_sum = 0.0;
  const int trials = 400;
  for (int s = 0; s < trials; ++s)
    mean_sum += random_dropout_rates(budget, d, derive_seed(50, s)).mean();
  CHECK(std::abs(mean_sum / trials - budget) <
        3.0 * std::sqrt(budget * (1 - budget) / (trials * d)));
}
