#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "femda/rng.hpp"
#include "femda/types.hpp"

namespace femda {

enum class CenterSource : std::uint8_t { GroundTruth, EmpiricalClassMean };

struct ContaminationSpec {
  double fraction = 0.0;  // epsilon, per-class fraction of points altered
  double lambda = 1.0;    // radial scale factor about the class center
  CenterSource center_source = CenterSource::GroundTruth;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ContaminationResult {
  LabeledDataset data;
  std::vector<Index> altered;  // row indices, ascending
};

// Scales round(fraction * n_k) points per class, chosen uniformly without
// replacement, as x <- mu_k + lambda (x - mu_k). Unselected points (and the
// whole dataset for lambda = 1) are returned bit-identical.
ContaminationResult contaminate(const LabeledDataset& data,
                                const std::map<int, Vector>& centers,
                                const ContaminationSpec& spec, Rng& rng);

// Per-class mean map of a dataset (the EmpiricalClassMean center source).
std::map<int, Vector> class_means(const LabeledDataset& data);

}  // namespace femda
