// Command-line benchmark driver: regenerates the synthetic-scenario and
// real-data experiments and converts stored results between report formats.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "femda/bench.hpp"
#include "femda/errors.hpp"

namespace {

using namespace femda;

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ConfigInvalid(std::string(what) + ": expected <a>:<b>, got '" + text + "'");
  }
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ConfigInvalid(std::string(what) + ": not numeric: '" + text + "'");
  }
}

std::vector<double> parse_sweep(const std::string& text) {
  // f0:f1:step, inclusive of both ends up to rounding.
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? 0 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw ConfigInvalid("--sweep: expected <f0>:<f1>:<step>, got '" + text + "'");
  }
  double f0 = 0, f1 = 0, step = 0;
  try {
    f0 = std::stod(text.substr(0, c1));
    f1 = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    step = std::stod(text.substr(c2 + 1));
  } catch (const std::exception&) {
    throw ConfigInvalid("--sweep: not numeric: '" + text + "'");
  }
  if (!(step > 0.0) || f1 < f0) throw ConfigInvalid("--sweep: bad range");
  std::vector<double> fractions;
  for (int i = 0;; ++i) {
    const double f = f0 + i * step;
    if (f > f1 + 1e-9) break;
    fractions.push_back(f);
  }
  return fractions;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> methods;
  std::string current;
  for (const char ch : text + ",") {
    if (ch == ',') {
      if (!current.empty()) methods.push_back(method_from_string(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (methods.empty()) throw ConfigInvalid("--methods: empty list");
  return methods;
}

void finish_run(const ResultsTable& table, const std::filesystem::path& out_dir) {
  write_results(table, out_dir);
  std::cout << markdown_report(table);
  if (!table.failures.empty()) {
    std::cout << "\n" << table.failures.size() << " repetition(s) failed; see "
              << (out_dir / "results.json").string() << "\n";
  }
  std::cout << "\nresults written to " << out_dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FEMDA: robust discriminant analysis benchmarks"};
  app.require_subcommand(1);

  // --- simulate ----------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "synthetic-scenario benchmark");
  std::string scenario_label = "green:1GG-0T";
  std::string contamination_arg, methods_arg = "QDA,TQDA,GQDA,RGQDA,FEMDA";
  std::string eig_arg = "1:10", tau_arg, beta_arg = "0.25:10", nu_arg = "1:10";
  std::string sim_out = "runs/simulate";
  int reps = 5, dim = 10, clusters = 5;
  std::int64_t n_train = 2000, n_test = 5000;
  std::uint64_t seed = 1;
  bool paper_scale = false, fixed_params = false;
  sim->set_config("--config", "", "flat key=value config file; flags override");
  sim->add_option("--scenario", scenario_label, "<color>:<pGG>GG-<pT>T");
  sim->add_option("--contamination", contamination_arg,
                  "<eps>:<lambda> applied to the training set");
  sim->add_option("--reps", reps, "repetitions");
  sim->add_option("--seed", seed, "master seed");
  sim->add_option("--out", sim_out, "output directory");
  sim->add_option("--methods", methods_arg, "comma-separated method list");
  sim->add_option("--m", dim, "dimension");
  sim->add_option("--k", clusters, "cluster count");
  sim->add_option("--n-train", n_train, "training points");
  sim->add_option("--n-test", n_test, "test points");
  sim->add_flag("--paper-scale", paper_scale, "n_train=5000, n_test=20000");
  sim->add_option("--eig", eig_arg, "dispersion eigenvalue range lo:hi");
  sim->add_option("--tau", tau_arg, "per-point scale range lo:hi (default 1:m)");
  sim->add_option("--beta", beta_arg, "generalized-Gaussian shape range lo:hi");
  sim->add_option("--nu", nu_arg, "Student shape range lo:hi");
  sim->add_flag("--fixed-params", fixed_params,
                "draw cluster parameters once, not per repetition");

  // --- real ---------------------------------------------------------------
  auto* real = app.add_subcommand("real", "real-dataset benchmark");
  std::string data_path, schema_path, real_methods = "QDA,TQDA,GQDA,RGQDA,FEMDA";
  std::string sweep_arg, real_contamination, real_out = "runs/real";
  double sweep_lambda = 5.0, train_fraction = 0.7;
  int real_reps = 100, resplit_every = 10;
  std::uint64_t real_seed = 1;
  real->set_config("--config", "", "flat key=value config file; flags override");
  real->add_option("--data", data_path, "dataset CSV")->required();
  real->add_option("--schema", schema_path, "schema/policy key=value file")->required();
  real->add_option("--sweep", sweep_arg, "contamination fractions <f0>:<f1>:<step>");
  real->add_option("--lambda", sweep_lambda, "scale factor for --sweep");
  real->add_option("--contamination", real_contamination, "<eps>:<lambda>");
  real->add_option("--reps", real_reps, "repetitions");
  real->add_option("--resplit-every", resplit_every,
                   "repetitions sharing one train/test split");
  real->add_option("--train-fraction", train_fraction, "training fraction");
  real->add_option("--seed", real_seed, "master seed");
  real->add_option("--out", real_out, "output directory");
  real->add_option("--methods", real_methods, "comma-separated method list");

  // --- report -------------------------------------------------------------
  auto* report = app.add_subcommand("report", "re-emit stored results");
  std::string in_dir, format_arg = "markdown";
  report->add_option("--in", in_dir, "directory holding results.json")->required();
  report->add_option("--format", format_arg, "csv | markdown | json-plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) {
      ExperimentConfig config;
      config.mode = BenchMode::Synthetic;
      const ScenarioLabel label = parse_scenario_label(scenario_label);
      config.scenario_label = scenario_label;
      config.scenario.m = dim;
      config.scenario.k = clusters;
      config.scenario.n_train = paper_scale ? 5000 : n_train;
      config.scenario.n_test = paper_scale ? 20000 : n_test;
      config.scenario.p_gg = label.p_gg;
      config.scenario.sharing = label.sharing;
      auto [eig_lo, eig_hi] = parse_pair(eig_arg, "--eig");
      config.scenario.eig_range = {eig_lo, eig_hi};
      if (tau_arg.empty()) {
        config.scenario.tau_range = {1.0, static_cast<double>(dim)};
      } else {
        auto [tau_lo, tau_hi] = parse_pair(tau_arg, "--tau");
        config.scenario.tau_range = {tau_lo, tau_hi};
      }
      auto [beta_lo, beta_hi] = parse_pair(beta_arg, "--beta");
      config.scenario.beta_range = {beta_lo, beta_hi};
      auto [nu_lo, nu_hi] = parse_pair(nu_arg, "--nu");
      config.scenario.nu_range = {nu_lo, nu_hi};
      if (!contamination_arg.empty()) {
        auto [eps, lambda] = parse_pair(contamination_arg, "--contamination");
        ContaminationSpec spec;
        spec.fraction = eps;
        spec.lambda = lambda;
        spec.center_source = CenterSource::GroundTruth;
        config.contamination = spec;
      }
      config.methods = parse_methods(methods_arg);
      config.repetitions = reps;
      config.master_seed = seed;
      config.fixed_params = fixed_params;
      config.output_dir = sim_out;
      finish_run(run_synthetic(config), config.output_dir);
    } else if (real->parsed()) {
      ExperimentConfig config;
      config.mode = BenchMode::Real;
      config.dataset_path = data_path;
      config.schema_path = schema_path;
      config.methods = parse_methods(real_methods);
      config.repetitions = real_reps;
      config.resplit_every = resplit_every;
      config.train_fraction = train_fraction;
      config.master_seed = real_seed;
      config.output_dir = real_out;
      if (!sweep_arg.empty()) {
        config.sweep = SweepSpec{parse_sweep(sweep_arg), sweep_lambda};
      } else if (!real_contamination.empty()) {
        auto [eps, lambda] = parse_pair(real_contamination, "--contamination");
        ContaminationSpec spec;
        spec.fraction = eps;
        spec.lambda = lambda;
        spec.center_source = CenterSource::EmpiricalClassMean;
        config.contamination = spec;
      }
      finish_run(run_real(config), config.output_dir);
    } else if (report->parsed()) {
      const ResultsTable table = load_results(in_dir);
      emit_report(table, report_format_from_string(format_arg), in_dir);
      std::cout << "report written to " << in_dir << "\n";
    }
  } catch (const ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidRange& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidShape& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
