#include "femda/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "femda/errors.hpp"

namespace femda {

namespace {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

std::map<int, Vector> truth_centers(const std::vector<ClusterParams>& truth) {
  std::map<int, Vector> centers;
  for (std::size_t c = 0; c < truth.size(); ++c) {
    centers.emplace(static_cast<int>(c), truth[c].mean);
  }
  return centers;
}

// Runs every method of one repetition on a shared train/test pair.
void run_methods(const ExperimentConfig& config, int rep,
                 const std::string& scenario_id, double fraction, double lambda,
                 const LabeledDataset& train_data, const LabeledDataset& test_data,
                 std::vector<RepRecord>& out) {
  for (const Method method : config.methods) {
    const auto start = std::chrono::steady_clock::now();
    const TrainedModel model = train(method, train_data, config.train_settings);
    const double ms = elapsed_ms(start);
    RepRecord record;
    record.repetition = rep;
    record.scenario_id = scenario_id;
    record.method = to_string(method);
    record.fraction = fraction;
    record.lambda = lambda;
    record.accuracy = accuracy(model, test_data);
    record.fit_time_ms = ms;
    record.convergence_failures = model.convergence_failures();
    out.push_back(std::move(record));
  }
}

struct GroupKey {
  std::string scenario_id, method;
  double fraction, lambda;
  bool operator==(const GroupKey&) const = default;
};

}  // namespace

void ExperimentConfig::validate() const {
  if (repetitions < 1) throw ConfigInvalid("config: repetitions >= 1 required");
  if (methods.empty()) throw ConfigInvalid("config: at least one method");
  if (mode == BenchMode::Synthetic) {
    scenario.validate();
    if (contamination &&
        contamination->center_source == CenterSource::EmpiricalClassMean &&
        sweep) {
      // allowed, nothing to check
    }
  } else {
    if (dataset_path.empty()) throw ConfigInvalid("config: dataset path required");
    if (schema_path.empty()) throw ConfigInvalid("config: schema path required");
    if (resplit_every < 1) throw ConfigInvalid("config: resplit_every >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
      throw ConfigInvalid("config: train_fraction in (0,1) required");
    }
    if (contamination &&
        contamination->center_source == CenterSource::GroundTruth) {
      throw ConfigInvalid("config: no ground-truth centers exist for real data");
    }
  }
  if (sweep) {
    if (sweep->fractions.empty()) throw ConfigInvalid("config: empty sweep");
    for (const double f : sweep->fractions) {
      if (!(f >= 0.0 && f <= 1.0)) {
        throw ConfigInvalid("config: sweep fractions must lie in [0,1]");
      }
    }
    if (!(sweep->lambda > 0.0)) throw ConfigInvalid("config: sweep lambda > 0");
  }
  if (contamination) contamination->validate();
}

ResultsTable run_synthetic(const ExperimentConfig& config) {
  config.validate();
  ResultsTable table;

  std::vector<ClusterParams> fixed_params;
  if (config.fixed_params) {
    Rng rng = make_rng(derive_seed(config.master_seed, kStreamParams, 0));
    fixed_params = generate_cluster_params(config.scenario, rng);
  }

  for (int rep = 0; rep < config.repetitions; ++rep) {
    try {
      ScenarioConfig sc = config.scenario;
      sc.seed = derive_seed(config.master_seed, kStreamData, static_cast<std::uint64_t>(rep));
      Rng data_rng = make_rng(sc.seed);
      SyntheticDataset ds =
          config.fixed_params
              ? generate_scenario_with_params(sc, fixed_params, data_rng)
              : generate_scenario(sc, data_rng);

      LabeledDataset train_data = ds.train;
      double fraction = 0.0, lambda = 1.0;
      if (config.contamination) {
        const auto centers =
            config.contamination->center_source == CenterSource::GroundTruth
                ? truth_centers(ds.truth)
                : class_means(ds.train);
        Rng contam_rng = make_rng(derive_seed(config.master_seed,
                                              kStreamContamination,
                                              static_cast<std::uint64_t>(rep)));
        train_data =
            contaminate(ds.train, centers, *config.contamination, contam_rng).data;
        fraction = config.contamination->fraction;
        lambda = config.contamination->lambda;
      }

      std::vector<RepRecord> records;
      run_methods(config, rep, config.scenario_label, fraction, lambda,
                  train_data, ds.test, records);
      for (auto& r : records) table.reps.push_back(std::move(r));
    } catch (const Error& e) {
      table.failures.push_back({rep, e.what()});
      std::cerr << "repetition " << rep << " failed: " << e.what() << "\n";
    }
  }
  table.rows = aggregate(table.reps);
  return table;
}

ResultsTable run_real(const ExperimentConfig& config) {
  config.validate();
  const CsvSchema schema = CsvSchema::from_file(config.schema_path);
  const PreprocessPolicy policy = PreprocessPolicy::from_file(config.schema_path);
  const auto [data, report] = preprocess(load_csv(config.dataset_path, schema), policy);
  const std::string scenario_id = config.dataset_path.stem().string();

  // One sweep point per fraction; a plain contamination spec (or none) is a
  // single point.
  std::vector<double> fractions{0.0};
  double lambda = 1.0;
  bool contaminate_train = false;
  if (config.sweep) {
    fractions = config.sweep->fractions;
    lambda = config.sweep->lambda;
    contaminate_train = true;
  } else if (config.contamination) {
    fractions = {config.contamination->fraction};
    lambda = config.contamination->lambda;
    contaminate_train = true;
  }

  ResultsTable table;
  int cached_block = -1;
  LabeledDataset train_split, test_split;
  for (int rep = 0; rep < config.repetitions; ++rep) {
    try {
      const int block = rep / config.resplit_every;
      if (block != cached_block) {
        Rng split_rng = make_rng(derive_seed(config.master_seed, kStreamSplit,
                                             static_cast<std::uint64_t>(block)));
        std::tie(train_split, test_split) =
            stratified_split(data, config.train_fraction, split_rng);
        cached_block = block;
      }

      std::vector<RepRecord> records;
      for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
        LabeledDataset train_data = train_split;
        if (contaminate_train) {
          ContaminationSpec spec;
          spec.fraction = fractions[fi];
          spec.lambda = lambda;
          spec.center_source = CenterSource::EmpiricalClassMean;
          const auto centers = class_means(train_split);
          Rng contam_rng = make_rng(derive_seed(
              config.master_seed, kStreamContamination,
              static_cast<std::uint64_t>(rep) * 4096 + fi));
          train_data = contaminate(train_split, centers, spec, contam_rng).data;
        }
        run_methods(config, rep, scenario_id, fractions[fi],
                    contaminate_train ? lambda : 1.0, train_data, test_split,
                    records);
      }
      for (auto& r : records) table.reps.push_back(std::move(r));
    } catch (const Error& e) {
      table.failures.push_back({rep, e.what()});
      std::cerr << "repetition " << rep << " failed: " << e.what() << "\n";
    }
  }
  table.rows = aggregate(table.reps);
  return table;
}

std::vector<ResultsRow> aggregate(const std::vector<RepRecord>& reps) {
  std::vector<GroupKey> order;
  std::vector<std::vector<const RepRecord*>> groups;
  for (const auto& rep : reps) {
    const GroupKey key{rep.scenario_id, rep.method, rep.fraction, rep.lambda};
    const auto it = std::find(order.begin(), order.end(), key);
    if (it == order.end()) {
      order.push_back(key);
      groups.emplace_back();
      groups.back().push_back(&rep);
    } else {
      groups[static_cast<std::size_t>(it - order.begin())].push_back(&rep);
    }
  }

  std::vector<ResultsRow> rows;
  for (std::size_t g = 0; g < order.size(); ++g) {
    const auto& group = groups[g];
    ResultsRow row;
    row.scenario_id = order[g].scenario_id;
    row.method = order[g].method;
    row.fraction = order[g].fraction;
    row.lambda = order[g].lambda;
    row.repetitions = static_cast<int>(group.size());

    const auto n = static_cast<double>(group.size());
    double acc_sum = 0.0, time_sum = 0.0;
    std::vector<double> accs;
    for (const auto* rep : group) {
      acc_sum += rep->accuracy;
      time_sum += rep->fit_time_ms;
      row.convergence_failures += rep->convergence_failures;
      accs.push_back(rep->accuracy);
    }
    row.mean_accuracy = acc_sum / n;
    row.mean_fit_time_ms = time_sum / n;
    double sq_sum = 0.0;
    for (const double a : accs) {
      sq_sum += (a - row.mean_accuracy) * (a - row.mean_accuracy);
    }
    row.std_accuracy = group.size() > 1 ? std::sqrt(sq_sum / (n - 1.0)) : 0.0;
    std::sort(accs.begin(), accs.end());
    const std::size_t mid = accs.size() / 2;
    row.median_accuracy = accs.size() % 2 == 1
                              ? accs[mid]
                              : 0.5 * (accs[mid - 1] + accs[mid]);
    rows.push_back(std::move(row));
  }
  return rows;
}

ReportFormat report_format_from_string(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "markdown") return ReportFormat::Markdown;
  if (name == "json-plot") return ReportFormat::JsonPlot;
  throw ConfigInvalid("unknown report format '" + name + "'");
}

std::string results_to_json(const ResultsTable& table) {
  nlohmann::json doc;
  doc["format"] = "femda-results";
  doc["version"] = 1;
  doc["rows"] = nlohmann::json::array();
  for (const auto& r : table.rows) {
    doc["rows"].push_back({{"scenario", r.scenario_id},
                           {"method", r.method},
                           {"fraction", r.fraction},
                           {"lambda", r.lambda},
                           {"repetitions", r.repetitions},
                           {"mean_accuracy", r.mean_accuracy},
                           {"std_accuracy", r.std_accuracy},
                           {"median_accuracy", r.median_accuracy},
                           {"mean_fit_time_ms", r.mean_fit_time_ms},
                           {"convergence_failures", r.convergence_failures}});
  }
  doc["reps"] = nlohmann::json::array();
  for (const auto& r : table.reps) {
    doc["reps"].push_back({{"repetition", r.repetition},
                           {"scenario", r.scenario_id},
                           {"method", r.method},
                           {"fraction", r.fraction},
                           {"lambda", r.lambda},
                           {"accuracy", r.accuracy},
                           {"fit_time_ms", r.fit_time_ms},
                           {"convergence_failures", r.convergence_failures}});
  }
  doc["failures"] = nlohmann::json::array();
  for (const auto& f : table.failures) {
    doc["failures"].push_back({{"repetition", f.repetition},
                               {"message", f.message}});
  }
  return doc.dump(2);
}

ResultsTable results_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, 0, std::string("results json: ") + e.what());
  }
  if (doc.value("format", "") != "femda-results") {
    throw ConfigInvalid("results json: unknown format");
  }
  ResultsTable table;
  for (const auto& r : doc.at("rows")) {
    ResultsRow row;
    row.scenario_id = r.at("scenario").get<std::string>();
    row.method = r.at("method").get<std::string>();
    row.fraction = r.at("fraction").get<double>();
    row.lambda = r.at("lambda").get<double>();
    row.repetitions = r.at("repetitions").get<int>();
    row.mean_accuracy = r.at("mean_accuracy").get<double>();
    row.std_accuracy = r.at("std_accuracy").get<double>();
    row.median_accuracy = r.at("median_accuracy").get<double>();
    row.mean_fit_time_ms = r.at("mean_fit_time_ms").get<double>();
    row.convergence_failures = r.at("convergence_failures").get<int>();
    table.rows.push_back(std::move(row));
  }
  for (const auto& r : doc.at("reps")) {
    RepRecord rep;
    rep.repetition = r.at("repetition").get<int>();
    rep.scenario_id = r.at("scenario").get<std::string>();
    rep.method = r.at("method").get<std::string>();
    rep.fraction = r.at("fraction").get<double>();
    rep.lambda = r.at("lambda").get<double>();
    rep.accuracy = r.at("accuracy").get<double>();
    rep.fit_time_ms = r.at("fit_time_ms").get<double>();
    rep.convergence_failures = r.at("convergence_failures").get<int>();
    table.reps.push_back(std::move(rep));
  }
  for (const auto& f : doc.at("failures")) {
    table.failures.push_back({f.at("repetition").get<int>(),
                              f.at("message").get<std::string>()});
  }
  return table;
}

std::string summary_csv(const ResultsTable& table) {
  std::ostringstream out;
  out << "scenario,method,fraction,lambda,repetitions,mean_accuracy,"
         "std_accuracy,median_accuracy,mean_fit_time_ms,convergence_failures\n";
  for (const auto& r : table.rows) {
    out << r.scenario_id << ',' << r.method << ',' << format_double(r.fraction)
        << ',' << format_double(r.lambda) << ',' << r.repetitions << ','
        << format_double(r.mean_accuracy) << ','
        << format_double(r.std_accuracy) << ','
        << format_double(r.median_accuracy) << ','
        << format_double(r.mean_fit_time_ms) << ',' << r.convergence_failures
        << '\n';
  }
  return out.str();
}

std::string reps_csv(const ResultsTable& table) {
  std::ostringstream out;
  out << "repetition,scenario,method,fraction,lambda,accuracy,fit_time_ms,"
         "convergence_failures\n";
  for (const auto& r : table.reps) {
    out << r.repetition << ',' << r.scenario_id << ',' << r.method << ','
        << format_double(r.fraction) << ',' << format_double(r.lambda) << ','
        << format_double(r.accuracy) << ',' << format_double(r.fit_time_ms)
        << ',' << r.convergence_failures << '\n';
  }
  return out.str();
}

std::string markdown_report(const ResultsTable& table) {
  // Row groups (scenario, fraction, lambda) and method columns in
  // first-appearance order.
  struct Block {
    std::string scenario_id;
    double fraction, lambda;
  };
  std::vector<Block> blocks;
  std::vector<std::string> methods;
  for (const auto& r : table.rows) {
    if (std::none_of(blocks.begin(), blocks.end(), [&](const Block& b) {
          return b.scenario_id == r.scenario_id && b.fraction == r.fraction &&
                 b.lambda == r.lambda;
        })) {
      blocks.push_back({r.scenario_id, r.fraction, r.lambda});
    }
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
  }

  std::ostringstream out;
  out << "| Scenario |";
  for (const auto& m : methods) out << ' ' << m << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < methods.size(); ++i) out << "---|";
  out << '\n';

  char buf[64];
  for (const auto& block : blocks) {
    const ResultsRow* best = nullptr;
    std::vector<const ResultsRow*> cells(methods.size(), nullptr);
    for (const auto& r : table.rows) {
      if (r.scenario_id != block.scenario_id || r.fraction != block.fraction ||
          r.lambda != block.lambda) {
        continue;
      }
      const auto mi = static_cast<std::size_t>(
          std::find(methods.begin(), methods.end(), r.method) - methods.begin());
      cells[mi] = &r;
      if (!best || r.mean_accuracy > best->mean_accuracy) best = &r;
    }
    out << "| " << block.scenario_id;
    if (block.fraction > 0.0) {
      std::snprintf(buf, sizeof buf, " (%g%% noise, lambda=%g)",
                    100.0 * block.fraction, block.lambda);
      out << buf;
    }
    out << " |";
    for (const auto* cell : cells) {
      if (!cell) {
        out << " |";
        continue;
      }
      if (cell == best) {
        std::snprintf(buf, sizeof buf, " **%.2f** |", 100.0 * cell->mean_accuracy);
      } else {
        std::snprintf(buf, sizeof buf, " %+.2f |",
                      100.0 * (cell->mean_accuracy - best->mean_accuracy));
      }
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::string json_plot(const ResultsTable& table) {
  nlohmann::json doc;
  doc["format"] = "femda-plot";
  doc["scenarios"] = nlohmann::json::object();
  for (const auto& r : table.rows) {
    auto& scenario = doc["scenarios"][r.scenario_id];
    scenario["lambda"] = r.lambda;
    auto& series = scenario["series"][r.method];
    series["fractions"].push_back(r.fraction);
    series["accuracy"].push_back(r.mean_accuracy);
    series["median_accuracy"].push_back(r.median_accuracy);
  }
  return doc.dump(2);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void write_results(const ResultsTable& table, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "results.json", results_to_json(table));
  write_file(dir / "summary.csv", summary_csv(table));
  write_file(dir / "reps.csv", reps_csv(table));
}

ResultsTable load_results(const std::filesystem::path& dir) {
  std::ifstream in(dir / "results.json");
  if (!in) throw IoError("load_results: cannot open " + (dir / "results.json").string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return results_from_json(buf.str());
}

void emit_report(const ResultsTable& table, ReportFormat format,
                 const std::filesystem::path& dir) {
  if (table.rows.empty()) throw EmptyDataset("emit_report: no results");
  std::filesystem::create_directories(dir);
  switch (format) {
    case ReportFormat::Csv:
      write_file(dir / "summary.csv", summary_csv(table));
      write_file(dir / "reps.csv", reps_csv(table));
      break;
    case ReportFormat::Markdown:
      write_file(dir / "report.md", markdown_report(table));
      break;
    case ReportFormat::JsonPlot:
      write_file(dir / "plot.json", json_plot(table));
      break;
  }
}

}  // namespace femda
