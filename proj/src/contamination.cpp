#include "femda/contamination.hpp"

#include <algorithm>
#include <cmath>

#include "femda/errors.hpp"

namespace femda {

void ContaminationSpec::validate() const {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ConfigInvalid("ContaminationSpec: fraction must lie in [0,1]");
  }
  if (!(lambda > 0.0)) {
    throw ConfigInvalid("ContaminationSpec: lambda must be positive");
  }
}

ContaminationResult contaminate(const LabeledDataset& data,
                                const std::map<int, Vector>& centers,
                                const ContaminationSpec& spec, Rng& rng) {
  spec.validate();
  ContaminationResult out;
  out.data = data;

  const auto groups = data.indices_by_class();
  for (int label = 0; label < static_cast<int>(groups.size()); ++label) {
    auto idx = groups[static_cast<std::size_t>(label)];
    if (idx.empty()) continue;
    const auto center = centers.find(label);
    if (center == centers.end()) {
      throw MissingCenter(label, "contaminate: no center for class " +
                                     std::to_string(label));
    }
    if (center->second.size() != data.dim()) {
      throw DimensionMismatch("contaminate: center dimension mismatch");
    }
    const auto n_sel = static_cast<std::size_t>(std::lround(
        spec.fraction * static_cast<double>(idx.size())));
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < n_sel; ++i) {
      const Index row = idx[i];
      if (spec.lambda != 1.0) {
        const Vector& mu = center->second;
        out.data.points.row(row) =
            (mu + spec.lambda * (data.points.row(row).transpose() - mu))
                .transpose();
      }
      out.altered.push_back(row);
    }
  }
  std::sort(out.altered.begin(), out.altered.end());
  return out;
}

std::map<int, Vector> class_means(const LabeledDataset& data) {
  std::map<int, Vector> means;
  const auto groups = data.indices_by_class();
  for (int label = 0; label < static_cast<int>(groups.size()); ++label) {
    const auto& idx = groups[static_cast<std::size_t>(label)];
    if (idx.empty()) continue;
    Vector sum = Vector::Zero(data.dim());
    for (const Index row : idx) sum += data.points.row(row).transpose();
    means.emplace(label, sum / static_cast<double>(idx.size()));
  }
  return means;
}

}  // namespace femda
