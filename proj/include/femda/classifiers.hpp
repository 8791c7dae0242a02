#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "femda/estimators.hpp"
#include "femda/linalg.hpp"
#include "femda/types.hpp"

namespace femda {

enum class Method { QDA, TQDA, GQDA, RGQDA, FEMDA };

std::string to_string(Method method);
Method method_from_string(const std::string& name);
const std::vector<Method>& all_methods();

struct TrainSettings {
  double tol = kDefaultTol;
  int femda_max_iter = kFemdaMaxIter;
  int student_max_iter = kStudentMaxIter;
};

struct TrainedModel {
  Method method = Method::QDA;
  std::vector<int> classes;                // dense ids, ascending
  std::vector<std::string> class_names;    // aligned with classes
  std::vector<ClusterParams> params;       // per class
  std::vector<double> nu;                  // per class, TQDA only
  std::optional<double> gqda_threshold;    // GQDA / RGQDA only
  std::vector<double> cached_logdets;      // per class
  std::vector<FixedPointDiagnostics> fit_diagnostics;  // iterative methods

  Index dim() const { return params.empty() ? 0 : params.front().mean.size(); }
  int num_classes() const { return static_cast<int>(classes.size()); }
  int convergence_failures() const;
};

// Estimates per-class parameters with the method's estimator and caches the
// log-determinants. Requires >= m+2 points in every class.
TrainedModel train(Method method, const LabeledDataset& data,
                   const TrainSettings& settings = {});

// Per-class scores; the predicted class minimizes the score, ties broken to
// the lowest class index.
std::vector<double> femda_score(const Vector& x, const TrainedModel& model);
std::vector<double> qda_score(const Vector& x, const TrainedModel& model);
std::vector<double> tqda_score(const Vector& x, const TrainedModel& model);
std::vector<double> gqda_score(const Vector& x, const TrainedModel& model);
std::vector<double> score(const TrainedModel& model, const Vector& x);

// n x K score matrix over a batch of observations (rows).
Matrix score_matrix(const TrainedModel& model, const Matrix& points);

// Grid search c in {0, 0.05, ..., 3} maximizing training accuracy of the
// rule argmin_k t_k + c log|Sigma_k|; ties keep the smallest c.
double select_gqda_threshold(const LabeledDataset& train,
                             const std::vector<ClusterParams>& params,
                             const std::vector<int>& classes);

int classify(const TrainedModel& model, const Vector& x);
std::vector<int> classify(const TrainedModel& model, const LabeledDataset& data);
double accuracy(const TrainedModel& model, const LabeledDataset& data);

// Versioned JSON round trip (row-major matrices, lossless doubles).
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace femda
