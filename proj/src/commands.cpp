#include "hetridge/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "hetridge/stats.hpp"

namespace hetridge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string out_path(const CliContext& ctx, const std::string& name) {
  fs::create_directories(ctx.out_dir);
  return (fs::path(ctx.out_dir) / name).string();
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_text(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open file for writing: " + path);
  return out;
}

/// Scalar form when the diagonal is constant, comma list otherwise.
std::string format_axis(const Vector& v) {
  bool constant = true;
  for (double x : v)
    if (x != v[0]) {
      constant = false;
      break;
    }
  if (constant && !v.empty()) return format_double(v[0]);
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += format_double(v[i]);
  }
  return s;
}

std::string estimator_name(const EstimatorChoice& e) { return e.name(); }

double mspe_of(const Vector& predicted, const Vector& actual) {
  double s = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - actual[i];
    s += d * d;
  }
  return s / static_cast<double>(predicted.size());
}

}  // namespace

Predictions apply_model(const ModelArtifact& model, const Matrix& x_raw,
                        const Matrix& z_raw) {
  if (x_raw.cols() != model.state.alpha.size())
    throw SchemaMismatch("apply_model: mean design width != fitted p");
  if (z_raw.cols() != model.state.q())
    throw SchemaMismatch("apply_model: variance design width != fitted q");
  const Matrix x = model.standardize ? standardized(x_raw, model.x_stats) : x_raw;
  const Matrix z = model.standardize ? standardized(z_raw, model.z_stats) : z_raw;
  Predictions pred = predict(model.state, x, z);
  if (model.center_response)
    for (double& v : pred.mean) v += model.y_offset;
  return pred;
}

void cmd_fit(const FitPayload& payload, const CliContext& ctx) {
  RawData raw = read_data_file(payload.data_path, payload.schema);
  const std::size_t n_total = raw.y.size();

  std::vector<std::size_t> train_idx(n_total), test_idx;
  for (std::size_t i = 0; i < n_total; ++i) train_idx[i] = i;
  if (payload.split) {
    const std::uint64_t seed = ctx.seed_override.value_or(payload.split->seed);
    RngStream stream(seed, 0, StreamPurpose::shuffle);
    std::vector<std::size_t> order = train_idx;
    for (std::size_t i = 0; i + 1 < n_total; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(stream.raw() % (n_total - i));
      std::swap(order[i], order[j]);
    }
    const std::size_t n_test = static_cast<std::size_t>(
        std::llround(payload.split->test_fraction * static_cast<double>(n_total)));
    if (n_test == 0 || n_test >= n_total)
      throw ConfigError("fit.split: test fraction leaves an empty train or test set");
    train_idx.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_test));
    test_idx.assign(order.end() - static_cast<std::ptrdiff_t>(n_test), order.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
  }

  Matrix x_train_raw = rows_subset(raw.x, train_idx);
  Matrix z_train_raw = rows_subset(raw.z, train_idx);
  Vector y_train_raw = subset(raw.y, train_idx);

  ModelArtifact model;
  model.standardize = payload.standardize;
  model.center_response = payload.center_response;
  model.schema = payload.schema;
  model.support_threshold = payload.support_threshold;
  if (payload.standardize) {
    try {
      model.x_stats = column_stats(x_train_raw);
    } catch (const Error&) {
      throw ConstantVarianceColumn("a mean column is constant on the training rows");
    }
    model.z_stats = column_stats(z_train_raw);
  }
  if (payload.center_response) model.y_offset = mean_of(y_train_raw);

  Matrix x_train = payload.standardize ? standardized(x_train_raw, model.x_stats)
                                       : x_train_raw;
  Matrix z_train = payload.standardize ? standardized(z_train_raw, model.z_stats)
                                       : z_train_raw;
  Vector y_train = y_train_raw;
  if (payload.center_response)
    for (double& v : y_train) v -= model.y_offset;

  Dataset train(std::move(y_train), std::move(x_train), std::move(z_train),
                payload.schema.mean_columns, payload.schema.variance_columns);

  model.tuning = resolve_tuning(payload.tuning, train.n(), train.p(), train.q());
  FitOptions opts = payload.options;
  opts.bar = payload.estimator.bar;
  opts.k = payload.estimator.k;
  model.options = opts;
  model.bar = opts.bar;

  const FitResult fit =
      opts.bar ? bar_fit(train, model.tuning, opts) : ar_fit(train, model.tuning, opts);
  model.state = fit.final;
  model.converged = fit.converged;

  save_model(model, out_path(ctx, "model.json"));

  const Support sup = support(model.state, payload.support_threshold);
  const double train_mspe =
      mspe_of(apply_model(model, x_train_raw, z_train_raw).mean, y_train_raw);
  double test_mspe = 0.0;
  if (payload.split) {
    const Matrix x_test = rows_subset(raw.x, test_idx);
    const Matrix z_test = rows_subset(raw.z, test_idx);
    test_mspe = mspe_of(apply_model(model, x_test, z_test).mean, subset(raw.y, test_idx));
  }

  auto out = open_text(out_path(ctx, "fit_report.txt"));
  out << "hetridge fit report\n";
  out << "generated_at: " << now_iso8601() << "\n";
  out << "data: " << payload.data_path << "\n";
  out << "n_total: " << n_total << "\n";
  out << "n_train: " << train.n() << "\n";
  if (payload.split) out << "n_test: " << test_idx.size() << "\n";
  out << "p: " << train.p() << "\n";
  out << "q: " << train.q() << "\n";
  out << "estimator: " << estimator_name(payload.estimator) << "\n";
  if (opts.bar) out << "converged: " << (fit.converged ? "true" : "false") << "\n";
  out << "condition_warning: " << (fit.condition_warning ? "true" : "false") << "\n";
  out << "stabilization: " << to_string(opts.stabilization) << "\n";
  out << "standardize: " << (payload.standardize ? "true" : "false") << "\n";
  out << "center_response: " << (payload.center_response ? "true" : "false") << "\n";
  out << "tuning_psi: " << format_axis(model.tuning.psi) << "\n";
  out << "tuning_omega: " << format_axis(model.tuning.omega) << "\n";
  out << "tuning_lambda: " << format_axis(model.tuning.lambda) << "\n";
  out << "tuning_gamma: " << format_axis(model.tuning.gamma) << "\n";
  out << "support_threshold: " << format_double(payload.support_threshold) << "\n";
  out << "selected_predictors_alpha: " << sup.alpha_support.size() << "\n";
  out << "selected_predictors_beta: " << sup.beta_support.size() << "\n";
  out << "training_mspe: " << format_double(train_mspe) << "\n";
  if (payload.split) out << "test_mspe: " << format_double(test_mspe) << "\n";

  out << "coefficients_alpha:\n";
  out << "name,estimate,selected\n";
  const auto is_selected = [](const std::vector<std::size_t>& set, std::size_t j) {
    return std::find(set.begin(), set.end(), j) != set.end();
  };
  for (std::size_t j = 0; j < model.state.alpha.size(); ++j)
    out << payload.schema.mean_columns[j] << "," << format_double(model.state.alpha[j])
        << "," << (is_selected(sup.alpha_support, j) ? 1 : 0) << "\n";
  out << "coefficients_beta:\n";
  out << "name,estimate,selected\n";
  for (std::size_t j = 0; j < model.state.q(); ++j)
    out << payload.schema.variance_columns[j] << ","
        << format_double(model.state.beta_star[j]) << ","
        << (is_selected(sup.beta_support, j) ? 1 : 0) << "\n";
  out << "c0," << format_double(model.state.c0_hat()) << ",-\n";
}

void cmd_simulate(const SimulatePayload& payload, const CliContext& ctx) {
  std::vector<std::vector<std::string>> metric_rows, hist_rows, qq_rows;
  for (const SimulationSpec& spec_in : payload.scenarios) {
    SimulationSpec spec = spec_in;
    if (ctx.seed_override) spec.master_seed = *ctx.seed_override;
    const double c0 = compute_c0(spec.noise);
    const std::vector<TrialResult> results = run_trials(spec);

    for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
      const AggregateMetrics m =
          aggregate_metrics(results, e, spec, c0, payload.support_threshold);
      metric_rows.push_back(
          {spec.label, spec.estimators[e].name(), std::to_string(spec.n),
           std::to_string(spec.p), std::to_string(spec.q), format_double(spec.rho),
           spec.noise.name(), std::to_string(spec.trials),
           std::to_string(spec.master_seed), format_double(payload.support_threshold),
           std::to_string(m.failures), std::to_string(m.used_trials),
           format_double(m.mse_alpha_nonsparse), format_double(m.mse_alpha_sparse),
           format_double(m.mse_beta_nonsparse), format_double(m.mse_beta_sparse),
           format_double(m.median_abs_sparse_alpha),
           format_double(m.median_abs_sparse_beta), format_double(m.misident_alpha1),
           format_double(m.misident_beta1), format_double(m.fn_alpha),
           format_double(m.fp_alpha), format_double(m.fn_beta),
           format_double(m.fp_beta)});

      if (payload.histogram_component < spec.p) {
        const Vector values = component_values(results, e, spec, Block::alpha,
                                               payload.histogram_component);
        if (!values.empty()) {
          for (const HistBin& b : histogram(values, payload.histogram_bins))
            hist_rows.push_back({spec.label, spec.estimators[e].name(),
                                 std::to_string(payload.histogram_component),
                                 format_double(b.low), format_double(b.high),
                                 std::to_string(b.count)});
        }
      }
      if (payload.qq_component < spec.q + 1) {
        const Vector values =
            component_values(results, e, spec, Block::beta_star, payload.qq_component);
        if (values.size() >= 10) {
          const QqData qq = qq_data_normal(values);
          for (const QqPoint& pt : qq.points)
            qq_rows.push_back({spec.label, spec.estimators[e].name(),
                               std::to_string(payload.qq_component),
                               format_double(pt.theoretical), format_double(pt.sample),
                               qq.degenerate ? "1" : "0"});
        }
      }
    }
  }
  write_csv(out_path(ctx, "metrics.csv"),
            {"scenario", "estimator", "n", "p", "q", "rho", "noise", "trials",
             "master_seed", "threshold", "failures", "used_trials",
             "mse_alpha_nonsparse", "mse_alpha_sparse", "mse_beta_nonsparse",
             "mse_beta_sparse", "median_abs_sparse_alpha", "median_abs_sparse_beta",
             "misident_alpha1", "misident_beta1", "fn_alpha", "fp_alpha", "fn_beta",
             "fp_beta"},
            metric_rows);
  write_csv(out_path(ctx, "histograms.csv"),
            {"scenario", "estimator", "component", "bin_low", "bin_high", "count"},
            hist_rows);
  write_csv(out_path(ctx, "qq.csv"),
            {"scenario", "estimator", "component", "theoretical", "sample", "degenerate"},
            qq_rows);
}

void cmd_cv(const CvPayload& payload, const CliContext& ctx) {
  const RawData raw = read_data_file(payload.data_path, payload.schema);
  Dataset d(Vector(raw.y), Matrix(raw.x), Matrix(raw.z), payload.schema.mean_columns,
            payload.schema.variance_columns);
  CvPlan plan = payload.plan;
  if (ctx.seed_override) plan.shuffle_seed = *ctx.seed_override;

  std::vector<StagedEntry> table;
  CvPoint best_point;
  double best_score = 0.0;
  if (payload.stages.empty()) {
    const GridSearchResult r =
        grid_search(d, payload.grid, plan, payload.estimator, payload.options,
                    payload.cv_options);
    for (const CvEntry& e : r.table) table.push_back({0, e});
    best_point = r.best_point;
    best_score = r.best_score;
  } else {
    const StagedSearchResult r =
        staged_search(d, payload.stages, payload.grid, plan, payload.estimator,
                      payload.options, payload.cv_options);
    table = r.table;
    best_point = r.best_point;
    best_score = r.best_score;
  }

  std::vector<std::vector<std::string>> rows;
  for (const StagedEntry& e : table)
    rows.push_back({std::to_string(e.stage), format_double(e.entry.point.psi),
                    format_double(e.entry.point.omega), format_double(e.entry.point.lambda),
                    format_double(e.entry.point.gamma), format_double(e.entry.score),
                    to_string(plan.criterion)});
  write_csv(out_path(ctx, "cv_table.csv"),
            {"stage", "psi", "omega", "lambda", "gamma", "score", "criterion"}, rows);

  json best;
  best["format_version"] = kConfigFormatVersion;
  best["psi"] = best_point.psi;
  best["omega"] = best_point.omega;
  best["lambda"] = best_point.lambda;
  best["gamma"] = best_point.gamma;
  best["score"] = best_score;
  best["criterion"] = to_string(plan.criterion);
  best["estimator"] = estimator_name(payload.estimator);
  auto out = open_text(out_path(ctx, "best_tuning.json"));
  out << best.dump(2) << '\n';
}

void cmd_diagnose(const DiagnosePayload& payload, const CliContext& ctx) {
  const IngestResult ing =
      ingest(payload.data_path, payload.schema, payload.standardize, false);
  const AssumptionReport rep = assumption_diagnostics(ing.dataset);

  auto out = open_text(out_path(ctx, "diagnostics.txt"));
  out << "hetridge diagnostics report\n";
  out << "generated_at: " << now_iso8601() << "\n";
  out << "data: " << payload.data_path << "\n";
  out << "n: " << ing.dataset.n() << "\n";
  out << "p: " << ing.dataset.p() << "\n";
  out << "q: " << ing.dataset.q() << "\n";
  out << "standardize: " << (payload.standardize ? "true" : "false") << "\n";
  out << "x_gram_lambda_min: " << format_double(rep.x_gram.min) << "\n";
  out << "x_gram_lambda_max: " << format_double(rep.x_gram.max) << "\n";
  out << "zstar_gram_lambda_min: " << format_double(rep.zstar_gram.min) << "\n";
  out << "zstar_gram_lambda_max: " << format_double(rep.zstar_gram.max) << "\n";
  out << "max_row_norm_x: " << format_double(rep.max_row_norm_x) << "\n";
  out << "max_row_norm_zstar: " << format_double(rep.max_row_norm_zstar) << "\n";
  out << "x_near_singular: " << (rep.x_near_singular ? "true" : "false") << "\n";
  out << "zstar_near_singular: " << (rep.zstar_near_singular ? "true" : "false") << "\n";

  if (payload.model_path) {
    const ModelArtifact model = load_model(*payload.model_path);
    const RawDesign design = read_design_file(payload.data_path, model.schema);
    if (!design.y)
      throw MissingValue("residual diagnostics need the response column '" +
                         model.schema.response_column + "'");
    const Predictions pred = apply_model(model, design.x, design.z);
    Vector standardized_residuals(design.y->size());
    for (std::size_t i = 0; i < standardized_residuals.size(); ++i)
      standardized_residuals[i] =
          ((*design.y)[i] - pred.mean[i]) / std::sqrt(pred.variance[i]);
    const QqData qq = qq_data_normal(standardized_residuals);
    std::vector<std::vector<std::string>> rows;
    for (const QqPoint& pt : qq.points)
      rows.push_back({format_double(pt.theoretical), format_double(pt.sample),
                      qq.degenerate ? "1" : "0"});
    write_csv(out_path(ctx, "residual_qq.csv"), {"theoretical", "sample", "degenerate"},
              rows);
    out << "residual_qq: residual_qq.csv\n";
  }
}

void cmd_predict(const PredictPayload& payload, const CliContext& ctx) {
  const ModelArtifact model = load_model(payload.model_path);
  const RawDesign design = read_design_file(payload.data_path, model.schema);
  const Predictions pred = apply_model(model, design.x, design.z);

  std::vector<std::string> header = {"row", "mean", "variance"};
  if (design.y) header.push_back("actual");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < pred.mean.size(); ++i) {
    std::vector<std::string> row = {std::to_string(i), format_double(pred.mean[i]),
                                    format_double(pred.variance[i])};
    if (design.y) row.push_back(format_double((*design.y)[i]));
    rows.push_back(std::move(row));
  }
  write_csv(out_path(ctx, "predictions.csv"), header, rows);

  auto out = open_text(out_path(ctx, "predict_summary.txt"));
  out << "rows: " << pred.mean.size() << "\n";
  if (design.y) out << "mspe: " << format_double(mspe_of(pred.mean, *design.y)) << "\n";
}

}  // namespace hetridge
