#include "femda/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "femda/errors.hpp"

namespace femda {

namespace {

constexpr double kScoreClampFactor = 1e-12;
constexpr int kModelFormatVersion = 1;

double score_clamp(const SPDMatrix& dispersion) {
  return kScoreClampFactor * dispersion.entries().trace() /
         static_cast<double>(dispersion.dim());
}

std::vector<double> row_as_vector(const Matrix& scores, Index row) {
  std::vector<double> out(static_cast<std::size_t>(scores.cols()));
  for (Index k = 0; k < scores.cols(); ++k)
    out[static_cast<std::size_t>(k)] = scores(row, k);
  return out;
}

Index argmin_row(const Matrix& scores, Index row) {
  Index best = 0;
  for (Index k = 1; k < scores.cols(); ++k) {
    if (scores(row, k) < scores(row, best)) best = k;
  }
  return best;
}

Matrix scores_from_distances(const TrainedModel& model, const Matrix& t) {
  const Index n = t.rows();
  const auto k = static_cast<Index>(model.classes.size());
  const auto m = static_cast<double>(model.dim());
  Matrix scores(n, k);
  switch (model.method) {
    case Method::QDA:
      for (Index c = 0; c < k; ++c) {
        scores.col(c) =
            t.col(c).array() + model.cached_logdets[static_cast<std::size_t>(c)];
      }
      break;
    case Method::FEMDA:
      for (Index c = 0; c < k; ++c) {
        const double eps =
            score_clamp(model.params[static_cast<std::size_t>(c)].dispersion);
        scores.col(c) =
            t.col(c).array().max(eps).log() +
            model.cached_logdets[static_cast<std::size_t>(c)] / m;
      }
      break;
    case Method::TQDA: {
      if (model.nu.size() != static_cast<std::size_t>(k)) {
        throw ConfigInvalid("tqda score: model carries no degrees of freedom");
      }
      for (Index c = 0; c < k; ++c) {
        const double nu = model.nu[static_cast<std::size_t>(c)];
        const double constant =
            -std::lgamma((nu + m) / 2.0) + std::lgamma(nu / 2.0) +
            (m / 2.0) * std::log(nu * M_PI) +
            0.5 * model.cached_logdets[static_cast<std::size_t>(c)];
        scores.col(c) = constant + ((nu + m) / 2.0) *
                                       (t.col(c).array() / nu).log1p();
      }
      break;
    }
    case Method::GQDA:
    case Method::RGQDA: {
      if (!model.gqda_threshold) {
        throw MissingThreshold("gqda score: threshold not set");
      }
      const double c_thr = *model.gqda_threshold;
      for (Index c = 0; c < k; ++c) {
        scores.col(c) =
            t.col(c).array() +
            c_thr * model.cached_logdets[static_cast<std::size_t>(c)];
      }
      break;
    }
  }
  return scores;
}

Matrix distance_matrix(const std::vector<ClusterParams>& params,
                       const Matrix& points) {
  const Index n = points.rows();
  Matrix t(n, static_cast<Index>(params.size()));
  for (std::size_t c = 0; c < params.size(); ++c) {
    t.col(static_cast<Index>(c)) =
        params[c].dispersion.mahalanobis_sq_rows(points, params[c].mean);
  }
  return t;
}

Matrix score_matrix_for(const TrainedModel& model, const Matrix& points,
                        Method method_override) {
  TrainedModel view = model;
  view.method = method_override;
  return scores_from_distances(view, distance_matrix(model.params, points));
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::QDA: return "QDA";
    case Method::TQDA: return "t-QDA";
    case Method::GQDA: return "GQDA";
    case Method::RGQDA: return "RGQDA";
    case Method::FEMDA: return "FEMDA";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "QDA") return Method::QDA;
  if (name == "TQDA" || name == "t-QDA" || name == "tQDA") return Method::TQDA;
  if (name == "GQDA") return Method::GQDA;
  if (name == "RGQDA") return Method::RGQDA;
  if (name == "FEMDA") return Method::FEMDA;
  throw ConfigInvalid("unknown method '" + name + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::QDA, Method::TQDA,
                                           Method::GQDA, Method::RGQDA,
                                           Method::FEMDA};
  return methods;
}

int TrainedModel::convergence_failures() const {
  return static_cast<int>(
      std::count_if(fit_diagnostics.begin(), fit_diagnostics.end(),
                    [](const FixedPointDiagnostics& d) { return !d.converged; }));
}

TrainedModel train(Method method, const LabeledDataset& data,
                   const TrainSettings& settings) {
  if (data.size() == 0) throw EmptyDataset("train: empty dataset");
  data.validate();
  const Index m = data.dim();

  TrainedModel model;
  model.method = method;
  const auto groups = data.indices_by_class();
  for (int label = 0; label < static_cast<int>(groups.size()); ++label) {
    const auto& idx = groups[static_cast<std::size_t>(label)];
    if (idx.empty()) continue;
    if (static_cast<Index>(idx.size()) < m + 2) {
      throw ClassTooSmall(label, "train: class " + std::to_string(label) +
                                     " has fewer than m+2 points");
    }
    model.classes.push_back(label);
    model.class_names.push_back(
        label < static_cast<int>(data.class_names.size())
            ? data.class_names[static_cast<std::size_t>(label)]
            : std::to_string(label));
  }

  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    const int label = model.classes[c];
    const Matrix points = data.rows_for_class(label);
    try {
      switch (method) {
        case Method::QDA:
        case Method::GQDA:
          model.params.push_back(estimate_gaussian(points));
          break;
        case Method::RGQDA: {
          auto [sp, diag] = student_em(points, settings.tol,
                                       settings.student_max_iter, 3.0);
          model.params.push_back(
              ClusterParams{std::move(sp.mean), sp.scatter.unit_determinant()});
          model.fit_diagnostics.push_back(diag);
          break;
        }
        case Method::TQDA: {
          auto [sp, diag] =
              student_em(points, settings.tol, settings.student_max_iter);
          model.params.push_back(
              ClusterParams{std::move(sp.mean), std::move(sp.scatter)});
          model.nu.push_back(sp.nu);
          model.fit_diagnostics.push_back(diag);
          break;
        }
        case Method::FEMDA: {
          auto [params, diag] =
              femda_fit(points, settings.tol, settings.femda_max_iter);
          model.params.push_back(std::move(params));
          model.fit_diagnostics.push_back(diag);
          break;
        }
      }
    } catch (const Error& e) {
      throw EstimationFailed(label, "train: class " + std::to_string(label) +
                                        ": " + e.what());
    }
  }

  for (const auto& p : model.params) {
    model.cached_logdets.push_back(p.dispersion.log_det());
  }
  if (method == Method::GQDA || method == Method::RGQDA) {
    model.gqda_threshold =
        select_gqda_threshold(data, model.params, model.classes);
  }
  return model;
}

Matrix score_matrix(const TrainedModel& model, const Matrix& points) {
  return scores_from_distances(model, distance_matrix(model.params, points));
}

std::vector<double> femda_score(const Vector& x, const TrainedModel& model) {
  return row_as_vector(score_matrix_for(model, x.transpose(), Method::FEMDA), 0);
}

std::vector<double> qda_score(const Vector& x, const TrainedModel& model) {
  return row_as_vector(score_matrix_for(model, x.transpose(), Method::QDA), 0);
}

std::vector<double> tqda_score(const Vector& x, const TrainedModel& model) {
  return row_as_vector(score_matrix_for(model, x.transpose(), Method::TQDA), 0);
}

std::vector<double> gqda_score(const Vector& x, const TrainedModel& model) {
  return row_as_vector(score_matrix_for(model, x.transpose(), Method::GQDA), 0);
}

std::vector<double> score(const TrainedModel& model, const Vector& x) {
  return row_as_vector(score_matrix(model, x.transpose()), 0);
}

double select_gqda_threshold(const LabeledDataset& train,
                             const std::vector<ClusterParams>& params,
                             const std::vector<int>& classes) {
  const Matrix t = distance_matrix(params, train.points);
  Vector logdets(static_cast<Index>(params.size()));
  for (std::size_t c = 0; c < params.size(); ++c) {
    logdets(static_cast<Index>(c)) = params[c].dispersion.log_det();
  }
  double best_c = 0.0;
  Index best_correct = -1;
  for (int step = 0; step <= 60; ++step) {
    const double c = 0.05 * step;
    Index correct = 0;
    for (Index i = 0; i < t.rows(); ++i) {
      Index best = 0;
      double best_score = t(i, 0) + c * logdets(0);
      for (Index k = 1; k < t.cols(); ++k) {
        const double s = t(i, k) + c * logdets(k);
        if (s < best_score) {
          best_score = s;
          best = k;
        }
      }
      if (classes[static_cast<std::size_t>(best)] ==
          train.labels[static_cast<std::size_t>(i)]) {
        ++correct;
      }
    }
    if (correct > best_correct) {
      best_correct = correct;
      best_c = c;
    }
  }
  return best_c;
}

int classify(const TrainedModel& model, const Vector& x) {
  const Matrix scores = score_matrix(model, x.transpose());
  return model.classes[static_cast<std::size_t>(argmin_row(scores, 0))];
}

std::vector<int> classify(const TrainedModel& model,
                          const LabeledDataset& data) {
  const Matrix scores = score_matrix(model, data.points);
  std::vector<int> labels(static_cast<std::size_t>(scores.rows()));
  for (Index i = 0; i < scores.rows(); ++i) {
    labels[static_cast<std::size_t>(i)] =
        model.classes[static_cast<std::size_t>(argmin_row(scores, i))];
  }
  return labels;
}

double accuracy(const TrainedModel& model, const LabeledDataset& data) {
  if (data.size() == 0) throw EmptyDataset("accuracy: empty dataset");
  const std::vector<int> predicted = classify(model, data);
  Index correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

std::string model_to_json(const TrainedModel& model) {
  nlohmann::json doc;
  doc["format"] = "femda-model";
  doc["version"] = kModelFormatVersion;
  doc["method"] = to_string(model.method);
  doc["dim"] = model.dim();
  doc["classes"] = model.classes;
  doc["class_names"] = model.class_names;
  doc["params"] = nlohmann::json::array();
  for (const auto& p : model.params) {
    nlohmann::json entry;
    entry["mean"] = std::vector<double>(p.mean.data(), p.mean.data() + p.mean.size());
    std::vector<double> flat;  // row-major
    flat.reserve(static_cast<std::size_t>(p.dispersion.dim() * p.dispersion.dim()));
    for (Index i = 0; i < p.dispersion.dim(); ++i)
      for (Index j = 0; j < p.dispersion.dim(); ++j)
        flat.push_back(p.dispersion.entries()(i, j));
    entry["dispersion"] = flat;
    doc["params"].push_back(std::move(entry));
  }
  if (!model.nu.empty()) doc["nu"] = model.nu;
  if (model.gqda_threshold) doc["gqda_threshold"] = *model.gqda_threshold;
  doc["cached_logdets"] = model.cached_logdets;
  return doc.dump(2);
}

TrainedModel model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, 0, std::string("model json: ") + e.what());
  }
  if (doc.value("format", "") != "femda-model" ||
      doc.value("version", 0) != kModelFormatVersion) {
    throw ConfigInvalid("model json: unknown format or version");
  }
  TrainedModel model;
  model.method = method_from_string(doc.at("method").get<std::string>());
  const auto m = doc.at("dim").get<Index>();
  model.classes = doc.at("classes").get<std::vector<int>>();
  model.class_names = doc.at("class_names").get<std::vector<std::string>>();
  for (const auto& entry : doc.at("params")) {
    const auto mean_raw = entry.at("mean").get<std::vector<double>>();
    const auto flat = entry.at("dispersion").get<std::vector<double>>();
    if (mean_raw.size() != static_cast<std::size_t>(m) ||
        flat.size() != static_cast<std::size_t>(m * m)) {
      throw ConfigInvalid("model json: parameter dimensions inconsistent");
    }
    Vector mean(m);
    for (Index i = 0; i < m; ++i) mean(i) = mean_raw[static_cast<std::size_t>(i)];
    Matrix disp(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j)
        disp(i, j) = flat[static_cast<std::size_t>(i * m + j)];
    model.params.push_back(ClusterParams{std::move(mean), SPDMatrix(disp)});
  }
  if (doc.contains("nu")) model.nu = doc.at("nu").get<std::vector<double>>();
  if (doc.contains("gqda_threshold")) {
    model.gqda_threshold = doc.at("gqda_threshold").get<double>();
  }
  model.cached_logdets = doc.at("cached_logdets").get<std::vector<double>>();
  return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_model: cannot open " + path.string());
  out << model_to_json(model) << '\n';
  if (!out) throw IoError("save_model: write failed for " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_model: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace femda
