#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "femda/linalg.hpp"
#include "femda/rng.hpp"
#include "femda/types.hpp"

namespace femda {

enum class Family : std::uint8_t { GeneralizedGaussian, StudentT };

// Whether the shape parameter of a cluster's generator is shared by all of
// its points ("green" scenarios) or drawn fresh for every point ("red").
enum class ShapeSharing : std::uint8_t { PerCluster, PerPoint };

struct GeneratorSpec {
  Family family = Family::GeneralizedGaussian;
  double shape = 1.0;  // beta for GG, nu for StudentT
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Full description of one synthetic experiment scenario.
struct ScenarioConfig {
  Index m = 10;
  int k = 5;
  Index n_train = 2000;
  Index n_test = 5000;
  double p_gg = 1.0;  // fraction of each cluster drawn generalized-Gaussian
  ShapeSharing sharing = ShapeSharing::PerCluster;
  Interval beta_range{0.25, 10.0};
  Interval nu_range{1.0, 10.0};
  Interval tau_range{1.0, 10.0};
  Interval eig_range{1.0, 10.0};
  std::uint64_t seed = 0;

  // Throws ConfigInvalid on out-of-range fields.
  void validate() const;
};

struct SyntheticDataset {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<ClusterParams> truth;
  // Audit trail of the generator: per-point family and scale factor.
  std::vector<Family> train_families, test_families;
  std::vector<double> train_taus, test_taus;
};

// mean + sqrt(tau) * G^(1/(2 beta)) * L u with G ~ Gamma(m/(2 beta), 2),
// u uniform on the unit sphere and L the Cholesky factor of dispersion.
Vector sample_generalized_gaussian(const Vector& mean,
                                   const SPDMatrix& dispersion, double beta,
                                   double tau, Rng& rng);

// mean + sqrt(tau) * L z / sqrt(g) with z standard normal and
// g ~ Gamma(nu/2, 2/nu).
Vector sample_multivariate_t(const Vector& mean, const SPDMatrix& dispersion,
                             double nu, double tau, Rng& rng);

// K unit-norm means and K random SPD dispersions.
std::vector<ClusterParams> generate_cluster_params(const ScenarioConfig& config,
                                                   Rng& rng);

SyntheticDataset generate_scenario(const ScenarioConfig& config, Rng& rng);
// Same, with the cluster parameters supplied by the caller instead of drawn.
SyntheticDataset generate_scenario_with_params(
    const ScenarioConfig& config, const std::vector<ClusterParams>& params,
    Rng& rng);
// Convenience: seeds the generator from config.seed.
SyntheticDataset generate_scenario(const ScenarioConfig& config);

// Scenario label grammar: "<color>:<pGG>GG-<pT>T", e.g. "green:0.6GG-0.4T".
// Color green = shapes shared per cluster, red = fresh per point.
// Throws ConfigInvalid on malformed labels or fractions not summing to 1.
struct ScenarioLabel {
  ShapeSharing sharing;
  double p_gg;
};
ScenarioLabel parse_scenario_label(const std::string& label);
std::string format_scenario_label(ShapeSharing sharing, double p_gg);

}  // namespace femda
