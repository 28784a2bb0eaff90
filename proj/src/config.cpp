#include "triage/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace triage {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = first + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    throw std::invalid_argument("config: bad number for '" + key + "': " +
                                value);
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  const char* first = value.data();
  const char* last = first + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    throw std::invalid_argument("config: bad integer for '" + key + "': " +
                                value);
  return out;
}

std::vector<int> parse_int_list(const std::string& key,
                                const std::string& value) {
  std::vector<int> out;
  std::istringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_int(key, trim(item)));
  return out;
}

std::string fmt_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

}  // namespace

std::string to_string(Scorer s) {
  switch (s) {
    case Scorer::kWeighted: return "weighted";
    case Scorer::kUnweighted: return "unweighted";
    case Scorer::kHybrid: return "hybrid";
    case Scorer::kEnsemble: return "ensemble";
  }
  throw std::invalid_argument("to_string: bad Scorer value");
}

std::string to_string(ReconMethod m) {
  switch (m) {
    case ReconMethod::kForwardFill: return "forward_fill";
    case ReconMethod::kLinear: return "linear";
    case ReconMethod::kZero: return "zero";
  }
  throw std::invalid_argument("to_string: bad ReconMethod value");
}

Scorer scorer_from_string(const std::string& s) {
  if (s == "weighted") return Scorer::kWeighted;
  if (s == "unweighted") return Scorer::kUnweighted;
  if (s == "hybrid") return Scorer::kHybrid;
  if (s == "ensemble") return Scorer::kEnsemble;
  throw std::invalid_argument(
      "unknown scorer '" + s +
      "' (expected weighted, unweighted, hybrid, or ensemble)");
}

ReconMethod recon_from_string(const std::string& s) {
  if (s == "forward_fill") return ReconMethod::kForwardFill;
  if (s == "linear") return ReconMethod::kLinear;
  if (s == "zero") return ReconMethod::kZero;
  throw std::invalid_argument(
      "unknown recon method '" + s +
      "' (expected forward_fill, linear, or zero)");
}

void TriageConfig::validate() const {
  if (!(budget > 0.0 && budget <= 1.0))
    throw std::invalid_argument("config: budget must lie in (0, 1]");
  if (!(r_min >= 0.0 && r_min < 1.0))
    throw std::invalid_argument("config: r_min must lie in [0, 1)");
  if (budget <= r_min)
    throw std::invalid_argument("config: budget must exceed r_min");
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("config: lambda must lie in (0, 1]");
  if (!(gamma >= 1.0))
    throw std::invalid_argument("config: gamma must be at least 1");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("config: alpha must lie in [0, 1]");
  if (k < 1) throw std::invalid_argument("config: k must be positive");
  if (window < k)
    throw std::invalid_argument("config: window must be at least k");
  if (scorer == Scorer::kEnsemble) {
    if (ensemble_ks.size() < 2)
      throw std::invalid_argument(
          "config: ensemble_ks needs at least two entries");
    for (int ek : ensemble_ks) {
      if (ek < 1)
        throw std::invalid_argument("config: ensemble_ks entries must be positive");
      if (window < ek)
        throw std::invalid_argument(
            "config: window must cover every ensemble_ks entry");
    }
  }
}

std::map<std::string, std::string> parse_kv_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected 'key = value' on line " +
                                  std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw std::invalid_argument("config: empty key on line " +
                                  std::to_string(line_no));
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

TriageConfig parse_config(const std::string& text, const TriageConfig& base) {
  TriageConfig cfg = base;
  for (const auto& [key, value] : parse_kv_text(text)) {
    if (key == "budget") cfg.budget = parse_double(key, value);
    else if (key == "k") cfg.k = parse_int(key, value);
    else if (key == "window") cfg.window = parse_int(key, value);
    else if (key == "lambda") cfg.lambda = parse_double(key, value);
    else if (key == "r_min") cfg.r_min = parse_double(key, value);
    else if (key == "alpha") cfg.alpha = parse_double(key, value);
    else if (key == "gamma") cfg.gamma = parse_double(key, value);
    else if (key == "scorer") cfg.scorer = scorer_from_string(value);
    else if (key == "recon") cfg.recon = recon_from_string(value);
    else if (key == "ensemble_ks") cfg.ensemble_ks = parse_int_list(key, value);
    else
      throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  return cfg;
}

TriageConfig load_preset(const std::string& path, const TriageConfig& base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open preset file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

std::string format_config(const TriageConfig& cfg) {
  std::ostringstream out;
  out << "budget = " << fmt_double(cfg.budget) << "\n";
  out << "k = " << cfg.k << "\n";
  out << "window = " << cfg.window << "\n";
  out << "lambda = " << fmt_double(cfg.lambda) << "\n";
  out << "r_min = " << fmt_double(cfg.r_min) << "\n";
  out << "alpha = " << fmt_double(cfg.alpha) << "\n";
  out << "gamma = " << fmt_double(cfg.gamma) << "\n";
  out << "scorer = " << to_string(cfg.scorer) << "\n";
  out << "recon = " << to_string(cfg.recon) << "\n";
  out << "ensemble_ks = ";
  for (size_t i = 0; i < cfg.ensemble_ks.size(); ++i) {
    if (i) out << ",";
    out << cfg.ensemble_ks[i];
  }
  out << "\n";
  return out.str();
}

}  // namespace triage
