#pragma once

#include <map>
#include <string>
#include <vector>

namespace triage {

/// How channel importance is derived from the component model.
enum class Scorer {
  kWeighted,    // variance-weighted squared loadings
  kUnweighted,  // plain squared loadings
  kHybrid,      // alpha blend of weighted PCA scores and raw channel variance
  kEnsemble,    // mean of normalized weighted scores across several k values
};

/// Gap-filling method applied to dropped samples.
enum class ReconMethod {
  kForwardFill,
  kLinear,
  kZero,
};

std::string to_string(Scorer s);
std::string to_string(ReconMethod m);
Scorer scorer_from_string(const std::string& s);
ReconMethod recon_from_string(const std::string& s);

/**
 * Knobs for the streaming rate-allocation pipeline.
 *
 * budget is the target mean sampling rate in (0, 1]; r_min the per-channel
 * floor in [0, 1); budget must exceed r_min. lambda in (0, 1] smooths
 * importance scores across windows (1.0 keeps a cumulative running mean).
 * gamma >= 1 sharpens the smoothed scores toward the important channels.
 * alpha in [0, 1] is the hybrid blend weight (1 = pure PCA scores).
 * ensemble_ks lists the component counts used when scorer is kEnsemble.
 */
struct TriageConfig {
  double budget = 0.5;
  int k = 10;
  int window = 50;
  double lambda = 1.0;
  double r_min = 0.05;
  double alpha = 1.0;
  double gamma = 1.0;
  Scorer scorer = Scorer::kWeighted;
  ReconMethod recon = ReconMethod::kLinear;
  std::vector<int> ensemble_ks = {5, 10, 20};

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Parses flat "key = value" text ('#' starts a comment). Unknown keys throw.
TriageConfig parse_config(const std::string& text, const TriageConfig& base = {});

/// Reads a preset file in the parse_config format.
TriageConfig load_preset(const std::string& path, const TriageConfig& base = {});

/// Serializes every field in the parse_config key set.
std::string format_config(const TriageConfig& cfg);

/// Parses flat "key = value" text into a raw map (shared by preset files and
/// the dataset manifest). Blank lines and '#' comments are skipped.
std::map<std::string, std::string> parse_kv_text(const std::string& text);

}  // namespace triage
