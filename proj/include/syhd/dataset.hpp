#pragma once

// Dataset ingestion: CSV with the label in the last column, or the paired
// feature-file/label-file layout used by the public HAR and ISOLET
// distributions. Labels are remapped to dense 1..c (sorted by original
// value) with the mapping kept for reporting predictions in original terms.

#include <optional>
#include <string>
#include <vector>

#include "syhd/matrix.hpp"

namespace syhd {

struct Dataset {
  Matrix x;
  std::vector<long long> raw_labels;      // as read from the file
  std::vector<int> y;                     // dense labels, filled by align_labels
  std::vector<long long> label_values;    // dense index - 1 -> original value
  int class_count = 0;

  std::size_t size() const { return x.rows(); }
  std::size_t feature_count() const { return x.cols(); }
};

// Rows of d floats plus an integral label in the last column; separators are
// commas and/or whitespace. Blank lines are skipped.
Dataset load_csv_dataset(const std::string& path);

// Whitespace-separated feature rows in one file, one integral label per line
// in the other.
Dataset load_xy_dataset(const std::string& features_path, const std::string& labels_path);

// Convenience dispatch: labels_path present selects the paired layout.
Dataset load_dataset(const std::string& features_path,
                     const std::optional<std::string>& labels_path);

// Builds one dense mapping over the union of raw labels (sorted ascending)
// and applies it to every given dataset, so train/test agree on indices.
void align_labels(std::vector<Dataset*> datasets);

// CSV with to-shortest floats and the original label last; parses back to
// numerically identical values.
void save_csv_dataset(const std::string& path, const Dataset& ds);

}  // namespace syhd
