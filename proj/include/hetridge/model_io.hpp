#pragma once

#include "hetridge/estimator.hpp"
#include "hetridge/ingest.hpp"

namespace hetridge {

constexpr int kModelFormatVersion = 1;

/// Everything needed to reuse a fit: the state, the standardization applied
/// at training time, the tuning and options that produced it, and the column
/// schema for validating prediction inputs.
struct ModelArtifact {
  int format_version = kModelFormatVersion;
  EstimatorState state;
  bool converged = false;  // BAR fits only
  bool bar = false;
  bool standardize = false;
  bool center_response = false;
  ColumnStats x_stats;
  ColumnStats z_stats;
  double y_offset = 0.0;
  TuningSchedule tuning;
  FitOptions options;
  DataFileSchema schema;
  double support_threshold = 1e-4;
};

void save_model(const ModelArtifact& model, const std::string& path);
ModelArtifact load_model(const std::string& path);

}  // namespace hetridge
