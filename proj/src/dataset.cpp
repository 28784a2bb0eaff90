#include "triage/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "triage/config.hpp"

namespace triage {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
    s.pop_back();
  size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

double parse_cell(const std::string& cell, int line, int column) {
  double out = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    throw std::runtime_error("csv parse error at line " + std::to_string(line) +
                             ", column " + std::to_string(column) +
                             ": not a number: '" + cell + "'");
  return out;
}

std::string fmt_value(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

}  // namespace

Dataset load_csv(const std::string& path,
                 const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv file: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty csv file: " + path);
  std::vector<std::string> header = split_fields(line);
  for (auto& h : header) h = strip(h);
  const int n_cols = static_cast<int>(header.size());
  if (n_cols == 0) throw std::runtime_error("empty csv header: " + path);

  int label_idx = -1;
  if (label_column) {
    for (int j = 0; j < n_cols; ++j)
      if (header[static_cast<size_t>(j)] == *label_column) label_idx = j;
    if (label_idx < 0)
      throw std::runtime_error("csv has no column named '" + *label_column +
                               "': " + path);
  }

  Dataset ds;
  ds.name = std::filesystem::path(path).stem().string();
  for (int j = 0; j < n_cols; ++j)
    if (j != label_idx) ds.channel_names.push_back(header[static_cast<size_t>(j)]);

  std::vector<double> flat;
  std::vector<int> labels;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (static_cast<int>(fields.size()) != n_cols)
      throw std::runtime_error(
          "csv parse error at line " + std::to_string(line_no) + ": expected " +
          std::to_string(n_cols) + " fields, got " +
          std::to_string(fields.size()));
    for (int j = 0; j < n_cols; ++j) {
      const double v =
          parse_cell(strip(fields[static_cast<size_t>(j)]), line_no, j + 1);
      if (j == label_idx)
        labels.push_back(static_cast<int>(std::lround(v)));
      else
        flat.push_back(v);
    }
    if (label_idx < 0) labels.push_back(0);
  }

  const long long rows = static_cast<long long>(labels.size());
  if (rows == 0) throw std::runtime_error("csv has no data rows: " + path);
  const int channels = static_cast<int>(ds.channel_names.size());
  ds.values.resize(rows, channels);
  for (long long t = 0; t < rows; ++t)
    for (int j = 0; j < channels; ++j)
      ds.values(t, j) = flat[static_cast<size_t>(t * channels + j)];
  ds.labels = Eigen::Map<const Eigen::VectorXi>(labels.data(), rows);
  return ds;
}

void write_csv(const std::string& path, const Dataset& data,
               bool include_labels) {
  const bool with_labels =
      include_labels ||
      (data.labels.size() > 0 && (data.labels.array() != 0).any());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv file: " + path);

  for (int j = 0; j < data.cols(); ++j) {
    if (j) out << ',';
    out << (j < static_cast<int>(data.channel_names.size())
                ? data.channel_names[static_cast<size_t>(j)]
                : "c" + std::to_string(j));
  }
  if (with_labels) out << (data.cols() ? ",label" : "label");
  out << '\n';

  for (long long t = 0; t < data.rows(); ++t) {
    for (int j = 0; j < data.cols(); ++j) {
      if (j) out << ',';
      out << fmt_value(data.values(t, j));
    }
    if (with_labels)
      out << (data.cols() ? "," : "") << (t < data.labels.size() ? data.labels(t) : 0);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> standardize(
    const Eigen::MatrixXd& train, const Eigen::MatrixXd& apply_to) {
  if (train.cols() != apply_to.cols())
    throw std::invalid_argument("standardize: channel counts do not match");
  if (train.rows() < 2)
    throw std::invalid_argument("standardize: need at least two training rows");

  Eigen::MatrixXd strain = train;
  Eigen::MatrixXd sapply = apply_to;
  for (Eigen::Index j = 0; j < train.cols(); ++j) {
    const double mean = train.col(j).mean();
    const double var = (train.col(j).array() - mean).square().sum() /
                       static_cast<double>(train.rows() - 1);
    if (var <= 0.0) {
      strain.col(j).setZero();
      sapply.col(j).setZero();
      continue;
    }
    const double sd = std::sqrt(var);
    strain.col(j) = (train.col(j).array() - mean) / sd;
    sapply.col(j) = (apply_to.col(j).array() - mean) / sd;
  }
  return {std::move(strain), std::move(sapply)};
}

Dataset resolve_dataset(const std::string& name,
                        const std::optional<std::string>& manifest_path) {
  std::string path;
  if (manifest_path) {
    path = *manifest_path;
  } else if (const char* env = std::getenv("TRIAGE_DATASET_MANIFEST")) {
    path = env;
  } else {
    throw std::runtime_error(
        "no dataset manifest: set TRIAGE_DATASET_MANIFEST or pass a path");
  }

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset manifest: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::map<std::string, std::string> kv = parse_kv_text(ss.str());

  const auto path_it = kv.find(name + ".path");
  if (path_it == kv.end()) {
    std::set<std::string> known;
    for (const auto& [key, value] : kv) {
      const auto dot = key.rfind(".path");
      if (dot != std::string::npos && dot + 5 == key.size())
        known.insert(key.substr(0, dot));
    }
    std::string listing;
    for (const auto& k : known) listing += (listing.empty() ? "" : ", ") + k;
    throw std::runtime_error("unknown dataset '" + name +
                             "'; manifest defines: " +
                             (listing.empty() ? "(nothing)" : listing));
  }

  std::filesystem::path csv(path_it->second);
  if (csv.is_relative())
    csv = std::filesystem::path(path).parent_path() / csv;

  std::optional<std::string> label_column;
  if (const auto it = kv.find(name + ".label_column"); it != kv.end())
    label_column = it->second;

  Dataset ds = load_csv(csv.string(), label_column);
  ds.name = name;
  if (const auto it = kv.find(name + ".sample_rate_hz"); it != kv.end()) {
    try {
      ds.sample_rate_hz = std::stod(it->second);
    } catch (const std::exception&) {
      throw std::runtime_error("bad sample_rate_hz for dataset '" + name +
                               "': " + it->second);
    }
  }
  return ds;
}

}  // namespace triage
