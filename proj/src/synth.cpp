#include "triage/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "triage/rng.hpp"

namespace triage {

namespace {

// Stream tags so each generator and perturbation owns a decorrelated
// substream of the caller's seed.
enum SeedTag : std::uint64_t {
  kTrioTag = 101,
  kGroupsTag = 102,
  kRegimeTag = 103,
  kJitterTag = 201,
  kLossTag = 202,
  kNoiseTag = 203,
  kDriftTag = 204,
};

Eigen::MatrixXd shift_channels(const Eigen::MatrixXd& x, int magnitude,
                               std::uint64_t seed) {
  if (magnitude == 0) return x;
  const long long rows = x.rows();
  Eigen::MatrixXd y(rows, x.cols());
  Rng rng(seed);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const long long shift = rng.uniform_int(-magnitude, magnitude);
    for (long long t = 0; t < rows; ++t) {
      const long long src = std::clamp<long long>(t - shift, 0, rows - 1);
      y(t, j) = x(src, j);
    }
  }
  return y;
}

Eigen::MatrixXd freeze_windows(const Eigen::MatrixXd& x, double fraction,
                               int window, std::uint64_t seed) {
  if (fraction <= 0.0 || window <= 0) return x;
  const long long n_windows = x.rows() / window;
  const long long count = std::min<long long>(
      std::llround(fraction * static_cast<double>(n_windows)),
      std::max<long long>(0, n_windows - 1));
  if (count <= 0) return x;

  // Window 0 has no prior row to hold, so only windows 1.. are candidates.
  std::vector<long long> candidates(static_cast<size_t>(n_windows - 1));
  std::iota(candidates.begin(), candidates.end(), 1);
  Rng rng(seed);
  for (size_t i = candidates.size(); i > 1; --i)
    std::swap(candidates[i - 1],
              candidates[static_cast<size_t>(rng.uniform_int(0, static_cast<long long>(i) - 1))]);
  candidates.resize(static_cast<size_t>(count));
  std::sort(candidates.begin(), candidates.end());

  Eigen::MatrixXd y = x;
  for (long long win : candidates) {
    const long long start = win * window;
    const Eigen::RowVectorXd held = y.row(start - 1);
    for (long long t = start; t < start + window; ++t) y.row(t) = held;
  }
  return y;
}

Eigen::MatrixXd add_noise(const Eigen::MatrixXd& x, double sigma,
                          std::uint64_t seed) {
  if (sigma <= 0.0) return x;
  Eigen::MatrixXd y = x;
  Rng rng(seed);
  for (long long t = 0; t < y.rows(); ++t)
    for (Eigen::Index j = 0; j < y.cols(); ++j)
      y(t, j) += sigma * rng.gaussian();
  return y;
}

double get_double(const std::map<std::string, double>& kv, const std::string& k,
                  double fallback) {
  const auto it = kv.find(k);
  return it == kv.end() ? fallback : it->second;
}

}  // namespace

Dataset gen_correlated_trio(double rho, double sigma2, long long n,
                            std::uint64_t seed) {
  if (!(rho > -1.0 && rho < 1.0))
    throw std::invalid_argument("gen_correlated_trio: rho outside (-1, 1)");
  if (!(sigma2 > 0.0))
    throw std::invalid_argument("gen_correlated_trio: sigma2 must be positive");
  if (n < 1)
    throw std::invalid_argument("gen_correlated_trio: n must be positive");

  Dataset ds;
  ds.name = "trio";
  ds.channel_names = {"a", "b", "c"};
  ds.values.resize(n, 3);
  ds.labels = Eigen::VectorXi::Zero(n);

  const double scale = std::sqrt(sigma2);
  const double cross = std::sqrt(1.0 - rho * rho);
  Rng rng(derive_seed(seed, kTrioTag));
  for (long long t = 0; t < n; ++t) {
    const double g1 = rng.gaussian();
    const double g2 = rng.gaussian();
    const double g3 = rng.gaussian();
    ds.values(t, 0) = scale * g1;
    ds.values(t, 1) = scale * (rho * g1 + cross * g2);
    ds.values(t, 2) = scale * g3;
  }
  return ds;
}

Dataset gen_group_dataset(double rho, long long n, double fault_fraction,
                          std::uint64_t seed) {
  if (!(rho >= 0.0 && rho < 1.0))
    throw std::invalid_argument("gen_group_dataset: rho outside [0, 1)");
  if (n < 1) throw std::invalid_argument("gen_group_dataset: n must be positive");
  if (!(fault_fraction >= 0.0 && fault_fraction <= 1.0))
    throw std::invalid_argument(
        "gen_group_dataset: fault_fraction outside [0, 1]");

  Dataset ds;
  ds.name = "groups";
  ds.values.resize(n, kGroupChannels);
  ds.labels = Eigen::VectorXi::Zero(n);
  for (int j = 0; j < kGroupChannels; ++j) {
    const char group = j < kGroupSize ? 'a' : (j < 2 * kGroupSize ? 'b' : 'c');
    const int base = group == 'a' ? 0 : (group == 'b' ? kGroupSize : 2 * kGroupSize);
    ds.channel_names.push_back(std::string(1, group) + std::to_string(j - base));
  }

  const double shared_w = std::sqrt(rho);
  const double own_w = std::sqrt(1.0 - rho);
  Rng rng(derive_seed(seed, kGroupsTag));
  for (long long t = 0; t < n; ++t) {
    const double shared = rng.gaussian();
    for (int j = 0; j < kGroupSize; ++j)
      ds.values(t, j) = shared_w * shared + own_w * rng.gaussian();
    for (int j = kGroupSize; j < kGroupChannels; ++j)
      ds.values(t, j) = rng.gaussian();
  }

  const long long fault_len = std::llround(fault_fraction * static_cast<double>(n));
  if (fault_len > 0) {
    const long long start =
        std::min(std::llround(0.6 * static_cast<double>(n)), n - fault_len);
    for (long long t = start; t < start + fault_len; ++t) {
      ds.labels(t) = 1;
      for (int j = 0; j < 2 * kGroupSize; ++j) ds.values(t, j) += 1.5;
    }
  }
  return ds;
}

int regime_group_size(int d) {
  return std::clamp(d / 4, 1, std::max(1, d / 2));
}

Dataset gen_regime_change(int d, long long onset, long long n,
                          std::uint64_t seed, double pre_amplitude,
                          double post_amplitude) {
  if (d < 2) throw std::invalid_argument("gen_regime_change: need d >= 2");
  if (n < 1) throw std::invalid_argument("gen_regime_change: n must be positive");
  if (onset < 0 || onset > n)
    throw std::invalid_argument("gen_regime_change: onset outside [0, n]");
  if (!(pre_amplitude > 0.0 && post_amplitude > 0.0))
    throw std::invalid_argument("gen_regime_change: amplitudes must be positive");

  const int g = regime_group_size(d);
  Dataset ds;
  ds.name = "regime";
  ds.values.resize(n, d);
  ds.labels = Eigen::VectorXi::Zero(n);
  for (int j = 0; j < d; ++j) ds.channel_names.push_back("s" + std::to_string(j));

  Rng rng(derive_seed(seed, kRegimeTag));
  for (long long t = 0; t < n; ++t) {
    const bool post = t >= onset;
    if (post) ds.labels(t) = 1;
    for (int j = 0; j < d; ++j) {
      double amp = 1.0;
      if (!post && j < g) amp = pre_amplitude;
      if (post && j >= g && j < 2 * g) amp = post_amplitude;
      ds.values(t, j) = amp * rng.gaussian();
    }
  }
  return ds;
}

std::string to_string(PerturbKind k) {
  switch (k) {
    case PerturbKind::kNone: return "none";
    case PerturbKind::kJitter: return "jitter";
    case PerturbKind::kPacketLoss: return "loss";
    case PerturbKind::kNoise: return "noise";
    case PerturbKind::kClockDrift: return "drift";
    case PerturbKind::kCombined: return "combined";
  }
  throw std::invalid_argument("to_string: bad PerturbKind value");
}

PerturbKind perturb_kind_from_string(const std::string& s) {
  if (s == "none") return PerturbKind::kNone;
  if (s == "jitter") return PerturbKind::kJitter;
  if (s == "loss") return PerturbKind::kPacketLoss;
  if (s == "noise") return PerturbKind::kNoise;
  if (s == "drift") return PerturbKind::kClockDrift;
  if (s == "combined") return PerturbKind::kCombined;
  throw std::invalid_argument(
      "unknown perturbation '" + s +
      "' (expected none, jitter, loss, noise, drift, or combined)");
}

Eigen::MatrixXd perturb(const Eigen::MatrixXd& values, const Perturbation& p) {
  switch (p.kind) {
    case PerturbKind::kNone:
      return values;
    case PerturbKind::kJitter:
      return shift_channels(values, p.jitter, derive_seed(p.seed, kJitterTag));
    case PerturbKind::kClockDrift:
      return shift_channels(values, p.drift, derive_seed(p.seed, kDriftTag));
    case PerturbKind::kPacketLoss:
      return freeze_windows(values, p.loss_fraction, p.loss_window,
                            derive_seed(p.seed, kLossTag));
    case PerturbKind::kNoise:
      return add_noise(values, p.noise_sigma, derive_seed(p.seed, kNoiseTag));
    case PerturbKind::kCombined: {
      Eigen::MatrixXd y =
          shift_channels(values, p.jitter, derive_seed(p.seed, kJitterTag));
      y = freeze_windows(y, p.loss_fraction, p.loss_window,
                         derive_seed(p.seed, kLossTag));
      y = add_noise(y, p.noise_sigma, derive_seed(p.seed, kNoiseTag));
      return shift_channels(y, p.drift, derive_seed(p.seed, kDriftTag));
    }
  }
  throw std::invalid_argument("perturb: bad PerturbKind value");
}

Dataset perturb(const Dataset& data, const Perturbation& p) {
  Dataset out = data;
  out.values = perturb(data.values, p);
  return out;
}

Dataset make_synthetic(const std::string& spec, std::uint64_t seed) {
  const auto colon = spec.find(':');
  const std::string family = spec.substr(0, colon);
  std::map<std::string, double> kv;
  if (colon != std::string::npos) {
    std::string rest = spec.substr(colon + 1);
    size_t pos = 0;
    while (pos < rest.size()) {
      const auto comma = rest.find(',', pos);
      const std::string item =
          rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                      : comma - pos);
      pos = comma == std::string::npos ? rest.size() : comma + 1;
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("make_synthetic: expected key=value, got '" +
                                    item + "'");
      const std::string key = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      double parsed = 0.0;
      const auto [ptr, ec] =
          std::from_chars(value.data(), value.data() + value.size(), parsed);
      if (ec != std::errc{} || ptr != value.data() + value.size())
        throw std::invalid_argument("make_synthetic: bad number for '" + key +
                                    "': " + value);
      kv[key] = parsed;
    }
  }

  auto require_keys = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : kv) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok)
        throw std::invalid_argument("make_synthetic: unknown key '" + key +
                                    "' for family '" + family + "'");
    }
  };

  if (family == "trio") {
    require_keys({"rho", "sigma2", "n"});
    return gen_correlated_trio(get_double(kv, "rho", 0.8),
                               get_double(kv, "sigma2", 1.0),
                               static_cast<long long>(get_double(kv, "n", 20000)),
                               seed);
  }
  if (family == "groups") {
    require_keys({"rho", "n", "fault"});
    return gen_group_dataset(get_double(kv, "rho", 0.8),
                             static_cast<long long>(get_double(kv, "n", 4000)),
                             get_double(kv, "fault", 0.3), seed);
  }
  if (family == "regime") {
    require_keys({"d", "onset", "n"});
    return gen_regime_change(static_cast<int>(get_double(kv, "d", 20)),
                             static_cast<long long>(get_double(kv, "onset", 300)),
                             static_cast<long long>(get_double(kv, "n", 1500)),
                             seed);
  }
  throw std::invalid_argument("make_synthetic: unknown family '" + family +
                              "' (expected trio, groups, or regime)");
}

}  // namespace triage
