#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "femda/classifiers.hpp"
#include "femda/contamination.hpp"
#include "femda/dataset_io.hpp"
#include "femda/distributions.hpp"

namespace femda {

enum class BenchMode { Synthetic, Real };

// Contamination sweep: one run per fraction at a fixed lambda.
struct SweepSpec {
  std::vector<double> fractions;
  double lambda = 5.0;
};

struct ExperimentConfig {
  BenchMode mode = BenchMode::Synthetic;

  // Synthetic mode.
  ScenarioConfig scenario;
  std::string scenario_label = "green:1GG-0T";
  bool fixed_params = false;  // keep cluster parameters fixed across reps

  // Real mode.
  std::filesystem::path dataset_path;
  std::filesystem::path schema_path;
  double train_fraction = 0.7;
  int resplit_every = 10;

  std::vector<Method> methods = all_methods();
  std::optional<ContaminationSpec> contamination;
  std::optional<SweepSpec> sweep;
  int repetitions = 5;
  std::uint64_t master_seed = 1;
  std::filesystem::path output_dir;
  TrainSettings train_settings;

  void validate() const;
};

struct RepRecord {
  int repetition = 0;
  std::string scenario_id;
  std::string method;
  double fraction = 0.0;
  double lambda = 1.0;
  double accuracy = 0.0;
  double fit_time_ms = 0.0;
  int convergence_failures = 0;
};

struct ResultsRow {
  std::string scenario_id;
  std::string method;
  double fraction = 0.0;
  double lambda = 1.0;
  int repetitions = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double median_accuracy = 0.0;
  double mean_fit_time_ms = 0.0;
  int convergence_failures = 0;
};

struct FailureRecord {
  int repetition = 0;
  std::string message;
};

struct ResultsTable {
  std::vector<ResultsRow> rows;
  std::vector<RepRecord> reps;
  std::vector<FailureRecord> failures;
};

// Seed streams: every consumer of randomness draws from its own stream of
// derive_seed(master, stream, index) so the method list or report order can
// never change what data is generated.
inline constexpr std::uint64_t kStreamData = 1;
inline constexpr std::uint64_t kStreamContamination = 2;
inline constexpr std::uint64_t kStreamSplit = 3;
inline constexpr std::uint64_t kStreamParams = 4;

ResultsTable run_synthetic(const ExperimentConfig& config);
ResultsTable run_real(const ExperimentConfig& config);

// Groups repetition records by (scenario, method, fraction, lambda) in
// first-appearance order; sample std (n-1), median = midpoint rule.
std::vector<ResultsRow> aggregate(const std::vector<RepRecord>& reps);

enum class ReportFormat { Csv, Markdown, JsonPlot };
ReportFormat report_format_from_string(const std::string& name);

std::string results_to_json(const ResultsTable& table);
ResultsTable results_from_json(const std::string& text);
std::string summary_csv(const ResultsTable& table);
std::string reps_csv(const ResultsTable& table);
// Paper-style delta table: the best method's cell holds its absolute
// accuracy (bold), every other cell the signed difference to it.
std::string markdown_report(const ResultsTable& table);
std::string json_plot(const ResultsTable& table);

// Writes results.json + summary.csv + reps.csv into dir.
void write_results(const ResultsTable& table, const std::filesystem::path& dir);
ResultsTable load_results(const std::filesystem::path& dir);
// Writes the requested format (csv also covers the per-repetition file).
void emit_report(const ResultsTable& table, ReportFormat format,
                 const std::filesystem::path& dir);

}  // namespace femda
