#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "femda/rng.hpp"
#include "femda/types.hpp"

namespace femda {

// How to read one CSV file. Shipped as a flat key=value file per dataset
// (see data/schemas/): label_column, delimiter (',' or 'ws' for whitespace
// runs), missing token, header flag and columns to ignore at parse time
// (e.g. non-numeric identifiers).
struct CsvSchema {
  int label_column = -1;  // negative counts from the end (-1 = last)
  std::string delimiter = ",";
  std::string missing_token = "?";
  bool has_header = false;
  std::vector<int> ignore_columns;
  std::vector<std::string> feature_names;  // optional override

  static CsvSchema from_file(const std::filesystem::path& path);
};

struct PreprocessPolicy {
  bool drop_missing_rows = true;
  bool drop_zero_variance_cols = true;
  int min_class_size = 0;
  std::vector<std::string> drop_columns;

  static PreprocessPolicy from_file(const std::filesystem::path& path);
};

struct PreprocessReport {
  Index input_rows = 0, output_rows = 0;
  Index input_cols = 0, output_cols = 0;
  std::vector<Index> rows_dropped_missing;
  std::vector<std::string> columns_dropped;          // with reason suffix
  std::vector<std::string> classes_dropped;          // "name (size)"
  std::string to_json() const;
};

// Parses numeric features and maps the label column to dense ids in
// first-appearance order. Cells equal to the missing token become NaN (the
// row flag); preprocess() is responsible for removing them.
LabeledDataset load_csv(const std::filesystem::path& path,
                        const CsvSchema& schema);

// Applies, in order: drop_columns, rows with missing values, zero-variance
// columns, classes below min_class_size. Class ids are re-densified after
// class drops. The returned dataset contains no NaN/Inf.
std::pair<LabeledDataset, PreprocessReport> preprocess(
    const LabeledDataset& data, const PreprocessPolicy& policy);

// Per-class shuffle-and-cut with round(train_fraction * n_k) rows in train.
std::pair<LabeledDataset, LabeledDataset> stratified_split(
    const LabeledDataset& data, double train_fraction, Rng& rng);

}  // namespace femda
