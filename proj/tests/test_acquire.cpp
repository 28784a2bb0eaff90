#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "triage/acquire.hpp"
#include "triage/rng.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace triage;

namespace {

std::vector<RateVector> constant_rates(double rate, int d, int windows) {
  std::vector<RateVector> log;
  for (int i = 0; i < windows; ++i)
    log.push_back({VectorXd::Constant(d, rate)});
  return log;
}

MatrixXd ramp(int rows, int cols) {
  MatrixXd m(rows, cols);
  for (int t = 0; t < rows; ++t)
    for (int j = 0; j < cols; ++j) m(t, j) = t + 1 + 10.0 * j;
  return m;
}

template <typename A, typename B>
bool exact_equal(const A& a, const B& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}

}  // namespace

TEST_CASE("rate one keeps everything; rate zero keeps only the anchor row") {
  const auto full = sample_mask(constant_rates(1.0, 3, 4), 25, 100, 9);
  CHECK(full.kept.all());

  const auto empty = sample_mask(constant_rates(0.0, 3, 4), 25, 100, 9);
  CHECK(empty.kept.row(0).all());
  CHECK(empty.kept.bottomRows(99).count() == 0);
}

TEST_CASE("empirical keep fraction tracks the commanded rate") {
  const long long t = 10000;
  const auto mask = sample_mask(constant_rates(0.05, 1, 1), t, t, 123);
  const double frac = mask.keep_fraction();
  CHECK(frac > 0.04);
  CHECK(frac < 0.06);

  // Binomial 3-sigma band per channel on a moderate rate.
  const auto m2 = sample_mask(constant_rates(0.3, 8, 1), t, t, 77);
  for (int j = 0; j < 8; ++j) {
    const double keep =
        static_cast<double>(m2.kept.col(j).count()) / static_cast<double>(t);
    CHECK(std::abs(keep - 0.3) < 3.0 * std::sqrt(0.3 * 0.7 / t) + 1.0 / t);
  }
}

TEST_CASE("window boundaries select the scheduled rate") {
  std::vector<RateVector> log;
  log.push_back({VectorXd::Constant(2, 1.0)});
  log.push_back({VectorXd::Constant(2, 0.0)});
  log.push_back({VectorXd::Constant(2, 1.0)});
  // 25 samples at window length 10: windows of 10, 10, and 5 rows.
  const auto mask = sample_mask(log, 10, 25, 5);
  CHECK(mask.kept.topRows(10).all());
  CHECK(mask.kept.middleRows(10, 10).count() == 0);
  CHECK(mask.kept.bottomRows(5).all());
}

TEST_CASE("mask draws are deterministic and channel-independent") {
  const auto a = sample_mask(constant_rates(0.4, 4, 3), 50, 150, 2024);
  const auto b = sample_mask(constant_rates(0.4, 4, 3), 50, 150, 2024);
  CHECK(exact_equal(a.kept, b.kept));

  const auto c = sample_mask(constant_rates(0.4, 4, 3), 50, 150, 2025);
  CHECK_FALSE(exact_equal(a.kept, c.kept));

  // Changing channel 2's schedule must not disturb the other channels:
  // each channel owns an independent stream, so parallel and serial
  // evaluation agree.
  auto log = constant_rates(0.4, 4, 3);
  for (auto& r : log) r.values(2) = 0.9;
  const auto d = sample_mask(log, 50, 150, 2024);
  for (int j : {0, 1, 3}) CHECK(exact_equal(d.kept.col(j), a.kept.col(j)));
}

TEST_CASE("ChannelSampler reproduces sample_mask window by window") {
  std::vector<RateVector> log;
  VectorXd r0(2), r1(2), r2(2);
  r0 << 0.2, 0.8;
  r1 << 0.6, 0.1;
  r2 << 0.9, 0.5;
  log.push_back({r0});
  log.push_back({r1});
  log.push_back({r2});
  const int w = 40;
  const long long rows = 100;  // last window partial
  const auto oneshot = sample_mask(log, w, rows, 314);

  for (int j = 0; j < 2; ++j) {
    ChannelSampler sampler(314, j);
    long long t = 0;
    for (int win = 0; win < 3; ++win) {
      const long long len = std::min<long long>(w, rows - t);
      const auto draws = sampler.draw(log[win].values(j), len);
      for (long long i = 0; i < len; ++i, ++t) {
        const bool expect = (t == 0) ? true : oneshot.kept(t, j);
        const bool got = (t == 0) ? true : draws[i];
        CHECK(got == expect);
      }
    }
  }
}

TEST_CASE("reconstruction methods on a ramp with kept endpoints") {
  MatrixXd x(5, 1);
  x << 1, 2, 3, 4, 5;
  AcquisitionMask mask;
  mask.kept.setConstant(5, 1, false);
  mask.kept(0, 0) = true;
  mask.kept(4, 0) = true;

  const MatrixXd lin = reconstruct(x, mask, ReconMethod::kLinear);
  for (int t = 0; t < 5; ++t) CHECK(lin(t, 0) == doctest::Approx(t + 1.0));

  const MatrixXd ff = reconstruct(x, mask, ReconMethod::kForwardFill);
  CHECK(ff(0, 0) == 1.0);
  CHECK(ff(1, 0) == 1.0);
  CHECK(ff(3, 0) == 1.0);
  CHECK(ff(4, 0) == 5.0);

  const MatrixXd z = reconstruct(x, mask, ReconMethod::kZero);
  CHECK(z(0, 0) == 1.0);
  CHECK(z(1, 0) == 0.0);
  CHECK(z(3, 0) == 0.0);
  CHECK(z(4, 0) == 5.0);
}

TEST_CASE("leading gaps back-fill and trailing gaps hold") {
  MatrixXd x(6, 1);
  x << 10, 20, 30, 40, 50, 60;
  AcquisitionMask mask;
  mask.kept.setConstant(6, 1, false);
  mask.kept(2, 0) = true;
  mask.kept(3, 0) = true;

  for (ReconMethod m : {ReconMethod::kLinear, ReconMethod::kForwardFill}) {
    const MatrixXd out = reconstruct(x, mask, m);
    CHECK(out(0, 0) == 30.0);
    CHECK(out(1, 0) == 30.0);
    CHECK(out(2, 0) == 30.0);
    CHECK(out(3, 0) == 40.0);
    CHECK(out(4, 0) == 40.0);
    CHECK(out(5, 0) == 40.0);
  }
}

TEST_CASE("an all-true mask reconstructs bit-exactly") {
  Rng rng(8);
  MatrixXd x(40, 3);
  for (int t = 0; t < 40; ++t)
    for (int j = 0; j < 3; ++j) x(t, j) = rng.gaussian() * 1e6;
  AcquisitionMask mask;
  mask.kept.setConstant(40, 3, true);
  for (ReconMethod m : {ReconMethod::kLinear, ReconMethod::kForwardFill,
                        ReconMethod::kZero}) {
    CHECK(exact_equal(reconstruct(x, mask, m), x));
  }
}

TEST_CASE("a channel with no retained samples is an error") {
  const MatrixXd x = ramp(10, 2);
  AcquisitionMask mask;
  mask.kept.setConstant(10, 2, true);
  mask.kept.col(1).setConstant(false);
  CHECK_THROWS_WITH_AS(reconstruct(x, mask, ReconMethod::kLinear),
                       doctest::Contains("channel 1"), std::invalid_argument);

  AcquisitionMask wrong_shape;
  wrong_shape.kept.setConstant(9, 2, true);
  CHECK_THROWS_AS(reconstruct(x, wrong_shape, ReconMethod::kLinear),
                  std::invalid_argument);
}

TEST_CASE("reconstruction error ordering on sampled sinusoids") {
  // Smooth signals: interpolation beats holding, holding beats zeroing.
  const long long t_len = 4000;
  const int d = 4;
  MatrixXd x(t_len, d);
  for (long long t = 0; t < t_len; ++t)
    for (int j = 0; j < d; ++j)
      x(t, j) = std::sin(2.0 * M_PI * (t / (90.0 + 20.0 * j)) + 0.7 * j);

  for (double budget : {0.1, 0.3, 0.5}) {
    int linear_wins = 0, ffill_wins = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto mask = sample_mask(constant_rates(budget, d, 1), t_len,
                                    t_len, derive_seed(600, seed));
      auto mse = [&](ReconMethod m) {
        return (reconstruct(x, mask, m) - x).squaredNorm() / (t_len * d);
      };
      const double lin = mse(ReconMethod::kLinear);
      const double ff = mse(ReconMethod::kForwardFill);
      const double zero = mse(ReconMethod::kZero);
      if (lin < ff) ++linear_wins;
      if (ff < zero) ++ffill_wins;
    }
    CHECK(linear_wins >= 9);
    CHECK(ffill_wins >= 9);
  }
}

TEST_CASE("forward-fill error on isolated gaps stays near (1 - r) * step") {
  // Random walk with unit Gaussian steps; drops are isolated (no two in a
  // row), so each dropped sample is rebuilt from its true predecessor and
  // the mean squared error is (1 - r) times the mean squared step.
  const double rate = 0.7;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(derive_seed(700, seed));
    const long long t_len = 20000;
    MatrixXd x(t_len, 1);
    x(0, 0) = 0.0;
    for (long long t = 1; t < t_len; ++t)
      x(t, 0) = x(t - 1, 0) + rng.gaussian();

    AcquisitionMask mask;
    mask.kept.setConstant(t_len, 1, true);
    Rng drop(derive_seed(701, seed));
    for (long long t = 1; t < t_len; ++t) {
      const bool prev_kept = mask.kept(t - 1, 0);
      // Candidate drops alternate so gaps stay single-step; doubling the
      // drop probability keeps the overall dropped fraction at 1 - rate.
      if (prev_kept && t % 2 == 1 && drop.uniform() < 2.0 * (1.0 - rate))
        mask.kept(t, 0) = false;
    }

    const MatrixXd rebuilt = reconstruct(x, mask, ReconMethod::kForwardFill);
    const double mse = (rebuilt - x).squaredNorm() / t_len;
    double step_sq = 0.0;
    for (long long t = 1; t < t_len; ++t) {
      const double dstep = x(t, 0) - x(t - 1, 0);
      step_sq += dstep * dstep;
    }
    step_sq /= (t_len - 1);
    CHECK(mse <= (1.0 - rate) * step_sq * 1.1);
  }
}

TEST_CASE("send_on_delta examples") {
  SUBCASE("staircase with half-step threshold") {
    MatrixXd x(6, 1);
    x << 0, 0, 1, 1, 2, 2;
    const auto mask = send_on_delta(x, VectorXd::Constant(1, 0.5));
    std::vector<bool> expect = {true, false, true, false, true, false};
    for (int t = 0; t < 6; ++t) CHECK(mask.kept(t, 0) == expect[t]);
  }
  SUBCASE("constant channel transmits only the first sample") {
    MatrixXd x = MatrixXd::Constant(50, 1, 3.25);
    const auto mask = send_on_delta(x, VectorXd::Constant(1, 0.1));
    CHECK(mask.kept(0, 0));
    CHECK(mask.kept.count() == 1);
  }
  SUBCASE("zero threshold keeps every change") {
    MatrixXd x(5, 1);
    x << 1, 1, 2, 2, 1;
    const auto mask = send_on_delta(x, VectorXd::Constant(1, 0.0));
    std::vector<bool> expect = {true, false, true, false, true};
    for (int t = 0; t < 5; ++t) CHECK(mask.kept(t, 0) == expect[t]);
  }
  SUBCASE("channels decide independently") {
    MatrixXd x(3, 2);
    x << 0, 0, 1, 0, 1, 5;
    const auto mask = send_on_delta(x, VectorXd::Constant(2, 0.5));
    CHECK(mask.kept(1, 0));
    CHECK_FALSE(mask.kept(1, 1));
    CHECK_FALSE(mask.kept(2, 0));
    CHECK(mask.kept(2, 1));
  }
  SUBCASE("reference is the last transmitted value, not the last sample") {
    MatrixXd x(4, 1);
    x << 0, 0.4, 0.8, 1.2;  // each step small, cumulative drift large
    const auto mask = send_on_delta(x, VectorXd::Constant(1, 0.5));
    CHECK(mask.kept(0, 0));
    CHECK_FALSE(mask.kept(1, 0));  // |0.4 - 0| < 0.5
    CHECK(mask.kept(2, 0));        // |0.8 - 0| > 0.5
    CHECK_FALSE(mask.kept(3, 0));  // |1.2 - 0.8| < 0.5
  }
  SUBCASE("validation") {
    MatrixXd x(3, 2);
    x.setZero();
    CHECK_THROWS_AS(send_on_delta(x, VectorXd::Constant(1, 0.1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(send_on_delta(x, VectorXd::Constant(2, -0.1)),
                    std::invalid_argument);
  }
}
