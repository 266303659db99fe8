#pragma once

#include "hetridge/config.hpp"

namespace hetridge {

struct CliContext {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
};

/// Output files land under ctx.out_dir (created if missing). Errors are
/// thrown; the CLI entry point maps them to exit codes.
void cmd_fit(const FitPayload& payload, const CliContext& ctx);
void cmd_simulate(const SimulatePayload& payload, const CliContext& ctx);
void cmd_cv(const CvPayload& payload, const CliContext& ctx);
void cmd_diagnose(const DiagnosePayload& payload, const CliContext& ctx);
void cmd_predict(const PredictPayload& payload, const CliContext& ctx);

/// Mean/variance predictions for raw (untransformed) design rows, routed
/// through the model's stored standardization and response offset.
Predictions apply_model(const ModelArtifact& model, const Matrix& x_raw,
                        const Matrix& z_raw);

}  // namespace hetridge
