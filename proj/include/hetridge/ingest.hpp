#pragma once

#include <optional>

#include "hetridge/csv.hpp"
#include "hetridge/dataset.hpp"
#include "hetridge/standardize.hpp"

namespace hetridge {

/// Column selection for a data file. The variance columns must not include a
/// constant column (the log-variance intercept is estimated internally), and
/// the response must be distinct from the covariates.
struct DataFileSchema {
  std::string response_column;
  std::vector<std::string> mean_columns;
  std::vector<std::string> variance_columns;

  void validate() const;
};

/// Raw parsed columns, before any transformation.
struct RawData {
  Vector y;
  Matrix x;
  Matrix z;
};

/// Parses the selected columns; throws ParseError/MissingValue with row and
/// column context, and ConstantVarianceColumn for a constant Z column.
RawData read_data_file(const std::string& path, const DataFileSchema& schema);

/// Reads X/Z only (no response); used at prediction time.
struct RawDesign {
  Matrix x;
  Matrix z;
  std::optional<Vector> y;  // present when the response column exists
};
RawDesign read_design_file(const std::string& path, const DataFileSchema& schema);

struct IngestResult {
  Dataset dataset;
  bool standardize = false;
  bool center_response = false;
  ColumnStats x_stats;  // meaningful when standardize
  ColumnStats z_stats;
  double y_offset = 0.0;
};

/// Whole-file ingestion: optional per-column (x - mean)/sd transform and
/// response centering, with the statistics retained for prediction-time
/// reuse.
IngestResult ingest(const std::string& path, const DataFileSchema& schema,
                    bool standardize, bool center_response);

}  // namespace hetridge
