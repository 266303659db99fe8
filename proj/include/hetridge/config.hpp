#pragma once

#include <optional>

#include <json.hpp>

#include "hetridge/ingest.hpp"
#include "hetridge/model_io.hpp"
#include "hetridge/tuning.hpp"

namespace hetridge {

constexpr int kConfigFormatVersion = 1;

/// Loads a config file and returns the payload under `subcommand`. The file
/// must contain format_version and exactly that payload key; unknown keys
/// anywhere are errors.
nlohmann::json load_config_payload(const std::string& path, const std::string& subcommand);

/// Fails on keys outside `allowed`.
void require_keys(const nlohmann::json& obj,
                  const std::vector<std::string>& allowed, const std::string& context);

enum class TuningSource { rate_default, values, file };

struct TuningConfig {
  TuningSource source = TuningSource::rate_default;
  // per-axis scalar or full diagonal (length checked at resolution time)
  Vector psi, omega, lambda, gamma;
  std::string file;
};

TuningSchedule resolve_tuning(const TuningConfig& cfg, std::size_t n, std::size_t p,
                              std::size_t q);

struct SplitConfig {
  double test_fraction = 0.0;
  std::uint64_t seed = 0;
};

struct FitPayload {
  std::string data_path;
  DataFileSchema schema;
  bool standardize = true;
  bool center_response = false;
  EstimatorChoice estimator;
  TuningConfig tuning;
  FitOptions options;
  std::optional<SplitConfig> split;
  double support_threshold = 1e-4;
};

struct SimulatePayload {
  std::vector<SimulationSpec> scenarios;
  std::size_t histogram_bins = 40;
  std::size_t histogram_component = 10;  // alpha index for the emitted histograms
  std::size_t qq_component = 0;          // beta* index for the emitted QQ data
  double support_threshold = 1e-4;
};

struct CvPayload {
  std::string data_path;
  DataFileSchema schema;
  EstimatorChoice estimator;
  FitOptions options;
  Grid grid;
  std::vector<Stage> stages;  // empty: joint search
  CvPlan plan;
  CvOptions cv_options;
};

struct DiagnosePayload {
  std::string data_path;
  DataFileSchema schema;
  bool standardize = false;
  std::optional<std::string> model_path;
};

struct PredictPayload {
  std::string model_path;
  std::string data_path;
};

FitPayload parse_fit_payload(const nlohmann::json& j);
SimulatePayload parse_simulate_payload(const nlohmann::json& j);
CvPayload parse_cv_payload(const nlohmann::json& j);
DiagnosePayload parse_diagnose_payload(const nlohmann::json& j);
PredictPayload parse_predict_payload(const nlohmann::json& j);

}  // namespace hetridge
