#include "hetridge/ingest.hpp"

#include <algorithm>
#include <set>

namespace hetridge {

void DataFileSchema::validate() const {
  if (response_column.empty()) throw ConfigError("schema: response_column is required");
  if (mean_columns.empty()) throw ConfigError("schema: mean_columns must not be empty");
  const auto check_list = [this](const std::vector<std::string>& cols, const char* what) {
    std::set<std::string> seen;
    for (const std::string& c : cols) {
      if (c == response_column)
        throw ConfigError(std::string("schema: response column '") + response_column +
                          "' also appears in " + what);
      if (!seen.insert(c).second)
        throw ConfigError(std::string("schema: duplicate column '") + c + "' in " + what);
    }
  };
  check_list(mean_columns, "mean_columns");
  check_list(variance_columns, "variance_columns");
}

namespace {

Matrix extract_columns(const CsvTable& t, const std::vector<std::string>& names,
                       const std::string& path) {
  std::vector<std::size_t> idx(names.size());
  for (std::size_t j = 0; j < names.size(); ++j) idx[j] = t.column_index(names[j]);
  Matrix m(t.rows.size(), names.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < names.size(); ++j)
      m(i, j) = parse_double_field(t.rows[i][idx[j]],
                                   path + " row " + std::to_string(i + 2) + " column '" +
                                       names[j] + "'");
  return m;
}

void check_variance_columns(const Matrix& z, const std::vector<std::string>& names) {
  for (std::size_t j = 0; j < z.cols(); ++j) {
    const double first = z(0, j);
    bool constant = true;
    for (std::size_t i = 1; i < z.rows(); ++i)
      if (z(i, j) != first) {
        constant = false;
        break;
      }
    if (constant)
      throw ConstantVarianceColumn(
          "variance column '" + names[j] +
          "' is constant; the intercept of the log-variance model is estimated "
          "internally, so a constant column is not identifiable");
  }
}

}  // namespace

RawData read_data_file(const std::string& path, const DataFileSchema& schema) {
  schema.validate();
  const CsvTable t = read_csv(path);
  if (t.rows.empty()) throw ParseError("no data rows in " + path);
  RawData raw;
  const std::size_t yidx = t.column_index(schema.response_column);
  raw.y.resize(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    raw.y[i] = parse_double_field(t.rows[i][yidx], path + " row " + std::to_string(i + 2) +
                                                       " column '" +
                                                       schema.response_column + "'");
  raw.x = extract_columns(t, schema.mean_columns, path);
  raw.z = extract_columns(t, schema.variance_columns, path);
  check_variance_columns(raw.z, schema.variance_columns);
  return raw;
}

RawDesign read_design_file(const std::string& path, const DataFileSchema& schema) {
  schema.validate();
  const CsvTable t = read_csv(path);
  if (t.rows.empty()) throw ParseError("no data rows in " + path);
  RawDesign raw;
  raw.x = extract_columns(t, schema.mean_columns, path);
  raw.z = extract_columns(t, schema.variance_columns, path);
  const bool have_y = std::find(t.header.begin(), t.header.end(),
                                schema.response_column) != t.header.end();
  if (have_y) {
    const std::size_t yidx = t.column_index(schema.response_column);
    Vector y(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      y[i] = parse_double_field(t.rows[i][yidx], path + " row " + std::to_string(i + 2) +
                                                     " column '" +
                                                     schema.response_column + "'");
    raw.y = std::move(y);
  }
  return raw;
}

IngestResult ingest(const std::string& path, const DataFileSchema& schema,
                    bool standardize, bool center_response) {
  RawData raw = read_data_file(path, schema);
  ColumnStats xs, zs;
  if (standardize) {
    try {
      xs = column_stats(raw.x);
    } catch (const Error&) {
      throw ConstantVarianceColumn("a mean column is constant and cannot be standardized");
    }
    zs = column_stats(raw.z);  // non-constant already guaranteed
    raw.x = standardized(raw.x, xs);
    raw.z = standardized(raw.z, zs);
  }
  double offset = 0.0;
  if (center_response) {
    offset = 0.0;
    for (double v : raw.y) offset += v;
    offset /= static_cast<double>(raw.y.size());
    for (double& v : raw.y) v -= offset;
  }
  IngestResult out{Dataset(std::move(raw.y), std::move(raw.x), std::move(raw.z),
                           schema.mean_columns, schema.variance_columns),
                   standardize, center_response, std::move(xs), std::move(zs), offset};
  return out;
}

}  // namespace hetridge
