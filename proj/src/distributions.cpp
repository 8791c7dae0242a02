#include "femda/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <regex>

#include "femda/errors.hpp"

namespace femda {

namespace {

double uniform_in(const Interval& iv, Rng& rng) {
  if (iv.lo == iv.hi) return iv.lo;
  std::uniform_real_distribution<double> uni(iv.lo, iv.hi);
  return uni(rng);
}

void check_interval(const Interval& iv, const char* name) {
  if (!(iv.lo <= iv.hi)) {
    throw ConfigInvalid(std::string(name) + ": interval bounds out of order");
  }
}

// Balanced class sizes: |n_k - n/K| <= 1, remainder to the first classes.
std::vector<Index> balanced_counts(Index n, int k) {
  std::vector<Index> counts(static_cast<std::size_t>(k), n / k);
  for (Index i = 0; i < n % k; ++i) counts[static_cast<std::size_t>(i)]++;
  return counts;
}

std::vector<Family> family_assignment(Index n_k, double p_gg, Rng& rng) {
  const auto n_gg = static_cast<Index>(std::lround(p_gg * static_cast<double>(n_k)));
  std::vector<Family> fam(static_cast<std::size_t>(n_k), Family::StudentT);
  std::fill(fam.begin(), fam.begin() + n_gg, Family::GeneralizedGaussian);
  std::shuffle(fam.begin(), fam.end(), rng);
  return fam;
}

struct SharedShapes {
  std::vector<double> beta;  // per cluster, PerCluster mode only
  std::vector<double> nu;
};

void fill_split(LabeledDataset& out, std::vector<Family>& families_out,
                std::vector<double>& taus_out, const ScenarioConfig& config,
                const std::vector<ClusterParams>& params,
                const SharedShapes& shared, Index n_total, Rng& rng) {
  out.points.resize(n_total, config.m);
  out.labels.resize(static_cast<std::size_t>(n_total));
  families_out.resize(static_cast<std::size_t>(n_total));
  taus_out.resize(static_cast<std::size_t>(n_total));
  for (int c = 1; c <= config.k; ++c) out.class_names.push_back(std::to_string(c));
  for (Index j = 0; j < config.m; ++j)
    out.feature_names.push_back("x" + std::to_string(j));

  const std::vector<Index> counts = balanced_counts(n_total, config.k);
  Index row = 0;
  for (int c = 0; c < config.k; ++c) {
    const Index n_k = counts[static_cast<std::size_t>(c)];
    const std::vector<Family> fam = family_assignment(n_k, config.p_gg, rng);
    for (Index i = 0; i < n_k; ++i, ++row) {
      const Family family = fam[static_cast<std::size_t>(i)];
      const double tau = uniform_in(config.tau_range, rng);
      double shape;
      if (config.sharing == ShapeSharing::PerCluster) {
        shape = family == Family::GeneralizedGaussian
                    ? shared.beta[static_cast<std::size_t>(c)]
                    : shared.nu[static_cast<std::size_t>(c)];
      } else {
        shape = family == Family::GeneralizedGaussian
                    ? uniform_in(config.beta_range, rng)
                    : uniform_in(config.nu_range, rng);
      }
      const auto& p = params[static_cast<std::size_t>(c)];
      out.points.row(row) =
          (family == Family::GeneralizedGaussian
               ? sample_generalized_gaussian(p.mean, p.dispersion, shape, tau, rng)
               : sample_multivariate_t(p.mean, p.dispersion, shape, tau, rng))
              .transpose();
      out.labels[static_cast<std::size_t>(row)] = c;
      families_out[static_cast<std::size_t>(row)] = family;
      taus_out[static_cast<std::size_t>(row)] = tau;
    }
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  if (m < 1) throw ConfigInvalid("ScenarioConfig: m >= 1 required");
  if (k < 1) throw ConfigInvalid("ScenarioConfig: k >= 1 required");
  const Index min_n = static_cast<Index>(k) * (m + 2);
  if (n_train < min_n || n_test < min_n) {
    throw ConfigInvalid("ScenarioConfig: n_train and n_test must be >= K*(m+2)");
  }
  if (!(p_gg >= 0.0 && p_gg <= 1.0)) {
    throw ConfigInvalid("ScenarioConfig: p_gg must lie in [0,1]");
  }
  check_interval(beta_range, "beta_range");
  check_interval(nu_range, "nu_range");
  check_interval(tau_range, "tau_range");
  check_interval(eig_range, "eig_range");
  if (!(beta_range.lo > 0.0)) throw ConfigInvalid("beta_range: must be positive");
  if (!(nu_range.lo > 0.0)) throw ConfigInvalid("nu_range: must be positive");
  if (!(tau_range.lo > 0.0)) throw ConfigInvalid("tau_range: must be positive");
  if (!(eig_range.lo > 0.0)) throw ConfigInvalid("eig_range: must be positive");
}

Vector sample_generalized_gaussian(const Vector& mean,
                                   const SPDMatrix& dispersion, double beta,
                                   double tau, Rng& rng) {
  if (!(beta > 0.0)) throw InvalidShape("sample_generalized_gaussian: beta > 0");
  if (!(tau > 0.0)) throw InvalidShape("sample_generalized_gaussian: tau > 0");
  const auto m = dispersion.dim();
  if (mean.size() != m) throw DimensionMismatch("sample_generalized_gaussian");
  const Vector u = sample_unit_sphere(m, rng);
  std::gamma_distribution<double> gamma(static_cast<double>(m) / (2.0 * beta), 2.0);
  const double radius = std::pow(gamma(rng), 1.0 / (2.0 * beta));
  return mean + std::sqrt(tau) * radius * (dispersion.cholesky_factor() * u);
}

Vector sample_multivariate_t(const Vector& mean, const SPDMatrix& dispersion,
                             double nu, double tau, Rng& rng) {
  if (!(nu > 0.0)) throw InvalidShape("sample_multivariate_t: nu > 0");
  if (!(tau > 0.0)) throw InvalidShape("sample_multivariate_t: tau > 0");
  const auto m = dispersion.dim();
  if (mean.size() != m) throw DimensionMismatch("sample_multivariate_t");
  Vector z(m);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index i = 0; i < m; ++i) z(i) = normal(rng);
  std::gamma_distribution<double> gamma(nu / 2.0, 2.0 / nu);
  const double g = gamma(rng);
  return mean +
         std::sqrt(tau / g) * (dispersion.cholesky_factor() * z);
}

std::vector<ClusterParams> generate_cluster_params(const ScenarioConfig& config,
                                                   Rng& rng) {
  config.validate();
  std::vector<ClusterParams> params;
  params.reserve(static_cast<std::size_t>(config.k));
  for (int c = 0; c < config.k; ++c) {
    Vector mean = sample_unit_sphere(config.m, rng);
    SPDMatrix disp =
        random_spd(config.m, config.eig_range.lo, config.eig_range.hi, rng);
    params.push_back(ClusterParams{std::move(mean), std::move(disp)});
  }
  return params;
}

SyntheticDataset generate_scenario_with_params(
    const ScenarioConfig& config, const std::vector<ClusterParams>& params,
    Rng& rng) {
  config.validate();
  if (params.size() != static_cast<std::size_t>(config.k)) {
    throw ConfigInvalid("generate_scenario: params size != K");
  }
  SharedShapes shared;
  if (config.sharing == ShapeSharing::PerCluster) {
    for (int c = 0; c < config.k; ++c) {
      shared.beta.push_back(uniform_in(config.beta_range, rng));
      shared.nu.push_back(uniform_in(config.nu_range, rng));
    }
  }
  SyntheticDataset out;
  out.truth = params;
  fill_split(out.train, out.train_families, out.train_taus, config, params,
             shared, config.n_train, rng);
  fill_split(out.test, out.test_families, out.test_taus, config, params,
             shared, config.n_test, rng);
  return out;
}

SyntheticDataset generate_scenario(const ScenarioConfig& config, Rng& rng) {
  std::vector<ClusterParams> params = generate_cluster_params(config, rng);
  return generate_scenario_with_params(config, params, rng);
}

SyntheticDataset generate_scenario(const ScenarioConfig& config) {
  Rng rng = make_rng(config.seed);
  return generate_scenario(config, rng);
}

ScenarioLabel parse_scenario_label(const std::string& label) {
  static const std::regex grammar(
      R"(^(green|red):([0-9]*\.?[0-9]+)GG-([0-9]*\.?[0-9]+)T$)");
  std::smatch match;
  if (!std::regex_match(label, match, grammar)) {
    throw ConfigInvalid("scenario label must match <color>:<pGG>GG-<pT>T, got '" +
                        label + "'");
  }
  const double p_gg = std::stod(match[2]);
  const double p_t = std::stod(match[3]);
  if (std::abs(p_gg + p_t - 1.0) > 1e-9) {
    throw ConfigInvalid("scenario label fractions must sum to 1: '" + label + "'");
  }
  return ScenarioLabel{match[1] == "green" ? ShapeSharing::PerCluster
                                           : ShapeSharing::PerPoint,
                       p_gg};
}

std::string format_scenario_label(ShapeSharing sharing, double p_gg) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s:%gGG-%gT",
                sharing == ShapeSharing::PerCluster ? "green" : "red", p_gg,
                1.0 - p_gg);
  return buf;
}

}  // namespace femda
