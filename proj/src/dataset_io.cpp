#include "femda/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "femda/errors.hpp"

namespace femda {

std::vector<std::vector<Index>> LabeledDataset::indices_by_class() const {
  std::vector<std::vector<Index>> groups(class_names.empty()
                                             ? 0
                                             : class_names.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto label = static_cast<std::size_t>(labels[i]);
    if (label >= groups.size()) groups.resize(label + 1);
    groups[label].push_back(static_cast<Index>(i));
  }
  return groups;
}

Matrix LabeledDataset::rows_for_class(int label) const {
  std::vector<Index> idx;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) idx.push_back(static_cast<Index>(i));
  }
  Matrix out(static_cast<Index>(idx.size()), dim());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Index>(i)) = points.row(idx[i]);
  }
  return out;
}

void LabeledDataset::validate() const {
  if (static_cast<Index>(labels.size()) != points.rows()) {
    throw DimensionMismatch("LabeledDataset: labels/points length mismatch");
  }
  if (!points.allFinite()) {
    throw ConfigInvalid("LabeledDataset: non-finite entries");
  }
  for (const int label : labels) {
    if (label < 0 || label >= static_cast<int>(class_names.size())) {
      throw ConfigInvalid("LabeledDataset: label out of range");
    }
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::map<std::string, std::string> read_key_values(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigInvalid(path.string() + ": expected key=value, got '" + t + "'");
    }
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

bool parse_bool(const std::string& s, const char* key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigInvalid(std::string(key) + ": expected boolean, got '" + s + "'");
}

std::vector<std::string> tokenize(const std::string& line,
                                  const std::string& delimiter) {
  std::vector<std::string> tokens;
  if (delimiter == "ws") {
    std::stringstream ss(line);
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    return tokens;
  }
  const char delim = delimiter.empty() ? ',' : delimiter[0];
  std::string current;
  for (const char ch : line) {
    if (ch == delim) {
      tokens.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  tokens.push_back(current);
  return tokens;
}

double parse_cell(const std::string& token, std::size_t line, std::size_t col,
                  const std::string& missing_token) {
  const std::string t = trim(token);
  if (t == missing_token) return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ParseError(line, col, "line " + std::to_string(line) + ", column " +
                                    std::to_string(col) +
                                    ": not a number: '" + t + "'");
  }
  return value;
}

}  // namespace

CsvSchema CsvSchema::from_file(const std::filesystem::path& path) {
  const auto kv = read_key_values(path);
  CsvSchema schema;
  for (const auto& [key, value] : kv) {
    if (key == "label_column") {
      schema.label_column = std::stoi(value);
    } else if (key == "delimiter") {
      schema.delimiter = value;
    } else if (key == "missing") {
      schema.missing_token = value;
    } else if (key == "has_header") {
      schema.has_header = parse_bool(value, "has_header");
    } else if (key == "ignore_columns") {
      for (const auto& item : split_list(value))
        schema.ignore_columns.push_back(std::stoi(item));
    } else if (key == "feature_names") {
      schema.feature_names = split_list(value);
    }
    // Unknown keys belong to the preprocess policy sharing the file.
  }
  return schema;
}

PreprocessPolicy PreprocessPolicy::from_file(const std::filesystem::path& path) {
  const auto kv = read_key_values(path);
  PreprocessPolicy policy;
  for (const auto& [key, value] : kv) {
    if (key == "drop_missing_rows") {
      policy.drop_missing_rows = parse_bool(value, "drop_missing_rows");
    } else if (key == "drop_zero_variance") {
      policy.drop_zero_variance_cols = parse_bool(value, "drop_zero_variance");
    } else if (key == "min_class_size") {
      policy.min_class_size = std::stoi(value);
    } else if (key == "drop_columns") {
      policy.drop_columns = split_list(value);
    }
  }
  return policy;
}

LabeledDataset load_csv(const std::filesystem::path& path,
                        const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("load_csv: cannot open " + path.string());

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) throw EmptyFile("load_csv: " + path.string() + " is empty");

  std::size_t first_row = 0;
  std::vector<std::string> header;
  if (schema.has_header) {
    header = tokenize(lines[0], schema.delimiter);
    first_row = 1;
    if (lines.size() == 1) {
      throw EmptyFile("load_csv: " + path.string() + " has a header only");
    }
  }

  const std::size_t ncols = tokenize(lines[first_row], schema.delimiter).size();
  int label_col = schema.label_column;
  if (label_col < 0) label_col += static_cast<int>(ncols);
  if (label_col < 0 || label_col >= static_cast<int>(ncols)) {
    throw ConfigInvalid("load_csv: label column out of range");
  }
  std::vector<bool> ignored(ncols, false);
  for (int col : schema.ignore_columns) {
    if (col < 0) col += static_cast<int>(ncols);
    if (col < 0 || col >= static_cast<int>(ncols)) {
      throw ConfigInvalid("load_csv: ignored column out of range");
    }
    ignored[static_cast<std::size_t>(col)] = true;
  }
  if (ignored[static_cast<std::size_t>(label_col)]) {
    throw ConfigInvalid("load_csv: label column cannot be ignored");
  }

  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (!ignored[c] && c != static_cast<std::size_t>(label_col)) {
      feature_cols.push_back(c);
    }
  }
  if (feature_cols.empty()) {
    throw ConfigInvalid("load_csv: no feature columns left");
  }

  LabeledDataset data;
  const auto n_rows = static_cast<Index>(lines.size() - first_row);
  data.points.resize(n_rows, static_cast<Index>(feature_cols.size()));
  data.labels.reserve(static_cast<std::size_t>(n_rows));
  std::map<std::string, int> label_ids;

  for (std::size_t r = first_row; r < lines.size(); ++r) {
    const std::size_t line_no = r + 1;
    const auto tokens = tokenize(lines[r], schema.delimiter);
    if (tokens.size() != ncols) {
      throw ParseError(line_no, 0,
                       "line " + std::to_string(line_no) + ": expected " +
                           std::to_string(ncols) + " columns, got " +
                           std::to_string(tokens.size()));
    }
    const Index row = static_cast<Index>(r - first_row);
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
      const std::size_t c = feature_cols[f];
      data.points(row, static_cast<Index>(f)) =
          parse_cell(tokens[c], line_no, c + 1, schema.missing_token);
    }
    const std::string label_token = trim(tokens[static_cast<std::size_t>(label_col)]);
    if (label_token == schema.missing_token) {
      throw ParseError(line_no, static_cast<std::size_t>(label_col) + 1,
                       "line " + std::to_string(line_no) + ": missing label");
    }
    const auto [it, inserted] =
        label_ids.emplace(label_token, static_cast<int>(label_ids.size()));
    if (inserted) data.class_names.push_back(label_token);
    data.labels.push_back(it->second);
  }

  if (!schema.feature_names.empty()) {
    if (schema.feature_names.size() != feature_cols.size()) {
      throw ConfigInvalid("load_csv: feature_names length mismatch");
    }
    data.feature_names = schema.feature_names;
  } else {
    for (const std::size_t c : feature_cols) {
      data.feature_names.push_back(
          schema.has_header && c < header.size() && !trim(header[c]).empty()
              ? trim(header[c])
              : "col" + std::to_string(c));
    }
  }
  return data;
}

std::pair<LabeledDataset, PreprocessReport> preprocess(
    const LabeledDataset& data, const PreprocessPolicy& policy) {
  PreprocessReport report;
  report.input_rows = data.size();
  report.input_cols = data.dim();

  // Column drops requested by name.
  std::vector<bool> keep_col(static_cast<std::size_t>(data.dim()), true);
  for (const auto& name : policy.drop_columns) {
    const auto it =
        std::find(data.feature_names.begin(), data.feature_names.end(), name);
    if (it == data.feature_names.end()) {
      throw ConfigInvalid("preprocess: drop column '" + name + "' not found");
    }
    keep_col[static_cast<std::size_t>(it - data.feature_names.begin())] = false;
    report.columns_dropped.push_back(name + " (policy)");
  }

  // Rows containing missing values in the surviving columns.
  std::vector<bool> keep_row(static_cast<std::size_t>(data.size()), true);
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.dim(); ++j) {
      if (keep_col[static_cast<std::size_t>(j)] && std::isnan(data.points(i, j))) {
        if (!policy.drop_missing_rows) {
          throw ConfigInvalid(
              "preprocess: missing values present but drop_missing_rows=false");
        }
        keep_row[static_cast<std::size_t>(i)] = false;
        report.rows_dropped_missing.push_back(i);
        break;
      }
    }
  }
  if (std::none_of(keep_row.begin(), keep_row.end(), [](bool b) { return b; })) {
    throw AllRowsDropped("preprocess: every row had missing values");
  }

  // Zero-variance columns over the surviving rows.
  if (policy.drop_zero_variance_cols) {
    for (Index j = 0; j < data.dim(); ++j) {
      if (!keep_col[static_cast<std::size_t>(j)]) continue;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (Index i = 0; i < data.size(); ++i) {
        if (!keep_row[static_cast<std::size_t>(i)]) continue;
        lo = std::min(lo, data.points(i, j));
        hi = std::max(hi, data.points(i, j));
      }
      if (lo == hi) {
        keep_col[static_cast<std::size_t>(j)] = false;
        report.columns_dropped.push_back(
            data.feature_names[static_cast<std::size_t>(j)] + " (zero variance)");
      }
    }
  }
  if (std::none_of(keep_col.begin(), keep_col.end(), [](bool b) { return b; })) {
    throw ConfigInvalid("preprocess: every column dropped");
  }

  // Small classes.
  std::vector<Index> class_sizes(data.class_names.size(), 0);
  for (Index i = 0; i < data.size(); ++i) {
    if (keep_row[static_cast<std::size_t>(i)]) {
      class_sizes[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(i)])]++;
    }
  }
  std::vector<int> new_id(data.class_names.size(), -1);
  std::vector<std::string> kept_names;
  for (std::size_t c = 0; c < class_sizes.size(); ++c) {
    if (class_sizes[c] >= policy.min_class_size && class_sizes[c] > 0) {
      new_id[c] = static_cast<int>(kept_names.size());
      kept_names.push_back(data.class_names[c]);
    } else {
      report.classes_dropped.push_back(data.class_names[c] + " (" +
                                       std::to_string(class_sizes[c]) + ")");
    }
  }
  if (kept_names.empty()) {
    throw AllClassesDropped("preprocess: every class below min_class_size");
  }
  for (Index i = 0; i < data.size(); ++i) {
    if (keep_row[static_cast<std::size_t>(i)] &&
        new_id[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(i)])] < 0) {
      keep_row[static_cast<std::size_t>(i)] = false;
    }
  }

  // Assemble.
  LabeledDataset out;
  out.class_names = kept_names;
  std::vector<Index> kept_cols;
  for (Index j = 0; j < data.dim(); ++j) {
    if (keep_col[static_cast<std::size_t>(j)]) {
      kept_cols.push_back(j);
      out.feature_names.push_back(data.feature_names[static_cast<std::size_t>(j)]);
    }
  }
  std::vector<Index> kept_rows;
  for (Index i = 0; i < data.size(); ++i) {
    if (keep_row[static_cast<std::size_t>(i)]) kept_rows.push_back(i);
  }
  out.points.resize(static_cast<Index>(kept_rows.size()),
                    static_cast<Index>(kept_cols.size()));
  for (std::size_t i = 0; i < kept_rows.size(); ++i) {
    for (std::size_t j = 0; j < kept_cols.size(); ++j) {
      out.points(static_cast<Index>(i), static_cast<Index>(j)) =
          data.points(kept_rows[i], kept_cols[j]);
    }
    out.labels.push_back(
        new_id[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(kept_rows[i])])]);
  }
  report.output_rows = out.size();
  report.output_cols = out.dim();
  out.validate();
  return {std::move(out), std::move(report)};
}

std::string PreprocessReport::to_json() const {
  nlohmann::json doc;
  doc["input_rows"] = input_rows;
  doc["output_rows"] = output_rows;
  doc["input_cols"] = input_cols;
  doc["output_cols"] = output_cols;
  doc["rows_dropped_missing"] = rows_dropped_missing;
  doc["columns_dropped"] = columns_dropped;
  doc["classes_dropped"] = classes_dropped;
  return doc.dump(2);
}

std::pair<LabeledDataset, LabeledDataset> stratified_split(
    const LabeledDataset& data, double train_fraction, Rng& rng) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigInvalid("stratified_split: train_fraction must lie in (0,1)");
  }
  std::vector<Index> train_rows, test_rows;
  const auto groups = data.indices_by_class();
  for (int label = 0; label < static_cast<int>(groups.size()); ++label) {
    auto idx = groups[static_cast<std::size_t>(label)];
    if (idx.empty()) continue;
    if (idx.size() < 2) {
      throw ClassTooSmall(label, "stratified_split: class " +
                                     std::to_string(label) +
                                     " has fewer than 2 points");
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::lround(
        train_fraction * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      (i < n_train ? train_rows : test_rows).push_back(idx[i]);
    }
  }

  const auto gather = [&](const std::vector<Index>& rows) {
    LabeledDataset out;
    out.class_names = data.class_names;
    out.feature_names = data.feature_names;
    out.points.resize(static_cast<Index>(rows.size()), data.dim());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.points.row(static_cast<Index>(i)) = data.points.row(rows[i]);
      out.labels.push_back(data.labels[static_cast<std::size_t>(rows[i])]);
    }
    return out;
  };
  return {gather(train_rows), gather(test_rows)};
}

}  // namespace femda
