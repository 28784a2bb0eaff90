#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace triage {

/**
 * A multichannel time series with optional integer labels.
 *
 * values is samples x channels, rows in time order. labels has one entry
 * per row; 0 means normal and nonzero values are event classes (all zero
 * when the source had no label column). sample_rate_hz is metadata used by
 * bandwidth accounting.
 */
struct Dataset {
  std::string name;
  Eigen::MatrixXd values;
  Eigen::VectorXi labels;
  std::vector<std::string> channel_names;
  double sample_rate_hz = 1.0;

  long long rows() const { return values.rows(); }
  int cols() const { return static_cast<int>(values.cols()); }
};

/**
 * Loads a headered CSV of numeric columns.
 *
 * label_column, when given, names the column consumed as integer labels;
 * the remaining columns become channels. Errors (missing header, unknown
 * label column, ragged row, non-numeric cell) throw std::runtime_error with
 * the 1-based line and column of the offense.
 */
Dataset load_csv(const std::string& path,
                 const std::optional<std::string>& label_column = {});

/// Writes a dataset back out in the load_csv format (label column last,
/// named "label", omitted when all labels are zero and include_labels is
/// false).
void write_csv(const std::string& path, const Dataset& data,
               bool include_labels = true);

/**
 * Per-channel standardization with the first split's statistics:
 * (x - mean_train) / std_train, where std is the sample standard deviation
 * of `train`. Returns {standardized train, standardized apply_to}; channels
 * with zero variance in the reference map to all-zero output in both.
 */
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> standardize(
    const Eigen::MatrixXd& train, const Eigen::MatrixXd& apply_to);

/**
 * Named dataset lookup through a manifest file.
 *
 * The manifest is flat "key = value" text with dotted keys:
 *   mydata.path = /abs/or/manifest-relative.csv
 *   mydata.label_column = label        (optional)
 *   mydata.sample_rate_hz = 1.0        (optional)
 * The manifest path comes from the TRIAGE_DATASET_MANIFEST environment
 * variable unless given explicitly. Unknown names list what the manifest
 * defines.
 */
Dataset resolve_dataset(const std::string& name,
                        const std::optional<std::string>& manifest_path = {});

}  // namespace triage
