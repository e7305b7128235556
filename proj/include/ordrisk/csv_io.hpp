#pragma once

// CSV ingestion for labeled feature tables, with per-column transforms and a
// drop report for rows a transform cannot accept, plus shortest round-trip
// double formatting for the CSV artifacts the tool writes.

#include <string>
#include <utility>
#include <vector>

#include "ordrisk/data_model.hpp"

namespace ordrisk {

enum class ColumnTransform { identity, log_e };

ColumnTransform parse_transform(const std::string& name);
std::string to_string(ColumnTransform t);

struct FeatureSpec {
  std::string column;
  ColumnTransform transform = ColumnTransform::identity;
};

struct LoadConfig {
  std::string label_column = "diagnosis";
  std::string positive_token = "M";  ///< label 1; every other token is 0
  char delimiter = ',';
  bool add_intercept = true;  ///< prepend a constant-1 "intercept" column
  /// Columns to keep, in order; empty selects every non-label column with the
  /// identity transform.
  std::vector<FeatureSpec> features;
};

struct DropReport {
  std::size_t rows_parsed = 0;
  std::size_t rows_kept = 0;
  std::size_t rows_dropped = 0;
  /// Count of dropped rows attributed to each transformed column (a row
  /// failing several columns is attributed to the first, in feature order).
  std::vector<std::pair<std::string, std::size_t>> dropped_by_column;
};

struct LoadedDataset {
  Dataset data;
  DropReport drops;
};

/// Parses the file, maps the label column through the positive token, applies
/// the per-column transforms, and drops rows where a log transform meets a
/// non-positive value (reported, not an error). Unknown columns, ragged rows
/// and unparseable numbers are errors naming the row and column.
LoadedDataset load_csv(const std::string& path, const LoadConfig& cfg);

/// Feature selection used for the breast-cancer case study: intercept plus
/// the worst-block measurements, log-transformed where the measurement is a
/// positive size or ratio.
std::vector<FeatureSpec> wdbc_default_features();

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace ordrisk
