#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace femda {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// A labelled point cloud: one observation per row of `points`, with dense
// class ids in `labels` (0-based, in first-appearance order of the source).
// `class_names` maps ids back to their external names.
struct LabeledDataset {
  Matrix points;  // n x m
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::vector<std::string> feature_names;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
  int num_classes() const { return static_cast<int>(class_names.size()); }

  // Indices of the rows belonging to each class id.
  std::vector<std::vector<Index>> indices_by_class() const;
  // Gathers the rows of one class into a dense matrix.
  Matrix rows_for_class(int label) const;
  // Check structural invariants: matching lengths, finite entries, labels in
  // range. Throws femda errors on violation.
  void validate() const;
};

}  // namespace femda
