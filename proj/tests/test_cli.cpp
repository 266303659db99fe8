#include <doctest.h>

#include <omp.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hetridge/commands.hpp"
#include "hetridge/stats.hpp"
#include "test_util.hpp"

using namespace hetridge;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "hetridge_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string without_timestamp(const std::string& report) {
  std::istringstream in(report);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("generated_at:", 0) != 0) out << line << '\n';
  return out.str();
}

double report_value(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + ": ", 0) == 0) return std::stod(line.substr(key.size() + 2));
  FAIL("key not found in report: ", key);
  return 0.0;
}

/// CSV with y depending on x1,x2 and noise variance driven by z1.
void write_hetero_csv(const fs::path& path, std::size_t n, std::uint64_t seed,
                      double beta = 1.0) {
  RngStream rng(seed);
  std::ostringstream ss;
  ss << "y,x1,x2,z1,z2\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = rng.normal(), x2 = rng.normal();
    const double z1 = rng.normal(), z2 = rng.normal();
    const double y = 2.0 * x1 - x2 + std::exp(0.5 * beta * z1) * rng.normal();
    ss << format_double(y) << ',' << format_double(x1) << ',' << format_double(x2) << ','
       << format_double(z1) << ',' << format_double(z2) << '\n';
  }
  write_file(path, ss.str());
}

DataFileSchema hetero_schema() {
  DataFileSchema s;
  s.response_column = "y";
  s.mean_columns = {"x1", "x2"};
  s.variance_columns = {"z1", "z2"};
  return s;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("ingest: standardization, identity transform, and guards") {
  const fs::path dir = temp_dir("ingest");
  write_file(dir / "toy.csv",
             "y,x1,x2,z1\n"
             "1.0,1.0,2.0,0.5\n"
             "2.0,2.0,4.0,1.5\n"
             "3.0,4.0,5.0,2.5\n");
  DataFileSchema schema;
  schema.response_column = "y";
  schema.mean_columns = {"x1", "x2"};
  schema.variance_columns = {"z1"};

  const IngestResult plain = ingest((dir / "toy.csv").string(), schema, false, false);
  CHECK(plain.dataset.x(2, 0) == 4.0);
  CHECK(plain.dataset.y == Vector{1.0, 2.0, 3.0});

  const IngestResult std_ = ingest((dir / "toy.csv").string(), schema, true, true);
  for (std::size_t j = 0; j < 2; ++j) {
    Vector col(3);
    for (std::size_t i = 0; i < 3; ++i) col[i] = std_.dataset.x(i, j);
    CHECK(mean_of(col) == doctest::Approx(0.0));
    CHECK(variance_of(col) == doctest::Approx(1.0));
  }
  CHECK(mean_of(std_.dataset.y) == doctest::Approx(0.0));
  CHECK(std_.y_offset == doctest::Approx(2.0));

  // de-standardization recovers the file values
  const Matrix back = destandardized(std_.dataset.x, std_.x_stats);
  CHECK(testutil::rel_diff(back(2, 0), 4.0) < 1e-12);
  CHECK(testutil::rel_diff(back(1, 1), 4.0) < 1e-12);
}

TEST_CASE("ingest: error paths carry row/column context") {
  const fs::path dir = temp_dir("ingest_err");
  DataFileSchema schema;
  schema.response_column = "y";
  schema.mean_columns = {"x1"};
  schema.variance_columns = {"z1"};

  write_file(dir / "missing.csv", "y,x1,z1\n1.0,,0.5\n2.0,2.0,1.5\n");
  CHECK_THROWS_AS(ingest((dir / "missing.csv").string(), schema, false, false), MissingValue);

  write_file(dir / "bad.csv", "y,x1,z1\n1.0,abc,0.5\n2.0,2.0,1.5\n");
  try {
    ingest((dir / "bad.csv").string(), schema, false, false);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("x1") != std::string::npos);
  }

  write_file(dir / "constz.csv", "y,x1,z1\n1.0,1.0,7.0\n2.0,2.0,7.0\n3.0,3.0,7.0\n");
  CHECK_THROWS_AS(ingest((dir / "constz.csv").string(), schema, false, false),
                  ConstantVarianceColumn);

  write_file(dir / "ragged.csv", "y,x1,z1\n1.0,1.0\n");
  CHECK_THROWS_AS(ingest((dir / "ragged.csv").string(), schema, false, false), ParseError);

  schema.mean_columns = {"nope"};
  write_file(dir / "ok.csv", "y,x1,z1\n1.0,1.0,0.5\n2.0,2.0,1.5\n3.0,1.0,0.7\n");
  CHECK_THROWS_AS(ingest((dir / "ok.csv").string(), schema, false, false), SchemaMismatch);
}

TEST_CASE("config payloads parse strictly") {
  const fs::path dir = temp_dir("config");
  write_file(dir / "fit.json", R"({
    "format_version": 1,
    "fit": {
      "data": {"path": "d.csv", "response_column": "y",
               "mean_columns": ["x1"], "variance_columns": ["z1"]},
      "estimator": {"type": "ar", "k": 2},
      "tuning": {"psi": 1.0, "omega": 1.0, "lambda": 0.5, "gamma": 0.5},
      "support_threshold": 1e-4
    }
  })");
  const FitPayload p = parse_fit_payload(load_config_payload((dir / "fit.json").string(), "fit"));
  CHECK(p.estimator.k == 2);
  CHECK(p.standardize);  // default
  CHECK(p.tuning.source == TuningSource::values);

  write_file(dir / "typo.json", R"({
    "format_version": 1,
    "fit": {
      "data": {"path": "d.csv", "response_column": "y",
               "mean_columns": ["x1"], "variance_columns": ["z1"]},
      "estimator": {"type": "ar", "k": 2},
      "support_treshold": 1e-4
    }
  })");
  CHECK_THROWS_AS(parse_fit_payload(load_config_payload((dir / "typo.json").string(), "fit")),
                  ConfigError);

  write_file(dir / "nover.json", R"({"fit": {}})");
  CHECK_THROWS_AS(load_config_payload((dir / "nover.json").string(), "fit"), ConfigError);
}

TEST_CASE("config round-trips through its JSON form") {
  const fs::path dir = temp_dir("config_rt");
  const std::string text = R"({
    "format_version": 1,
    "cv": {
      "data": {"path": "d.csv", "response_column": "y",
               "mean_columns": ["x1"], "variance_columns": ["z1"]},
      "estimator": {"type": "bar"},
      "grid": {"psi": [0.1, 1.0], "omega": 1.0, "lambda": [0.5], "gamma": [0.5]},
      "stages": [["psi"], ["lambda", "gamma"]],
      "plan": {"folds": 3, "criterion": "median_spe", "shuffle_seed": 9}
    }
  })";
  write_file(dir / "cv.json", text);
  const nlohmann::json first = nlohmann::json::parse(text);
  const nlohmann::json second = nlohmann::json::parse(first.dump());
  CHECK(first == second);

  const CvPayload p = parse_cv_payload(load_config_payload((dir / "cv.json").string(), "cv"));
  CHECK(p.estimator.bar);
  CHECK(p.plan.criterion == SpeCriterion::median_spe);
  CHECK(p.grid.psi_values == Vector{0.1, 1.0});
  REQUIRE(p.stages.size() == 2);
  CHECK(p.stages[1] == Stage{Axis::lambda, Axis::gamma});
}

TEST_CASE("model artifact round-trips bit-exactly") {
  const fs::path dir = temp_dir("model_rt");
  const fs::path csv = dir / "data.csv";
  write_hetero_csv(csv, 80, 61);

  FitPayload payload;
  payload.data_path = csv.string();
  payload.schema = hetero_schema();
  payload.estimator = {false, 3};
  CliContext ctx;
  ctx.out_dir = dir.string();
  cmd_fit(payload, ctx);

  const ModelArtifact m = load_model((dir / "model.json").string());
  const fs::path copy = dir / "model_copy.json";
  save_model(m, copy.string());
  const ModelArtifact m2 = load_model(copy.string());
  CHECK(m.state.alpha == m2.state.alpha);          // element-wise bit equality
  CHECK(m.state.beta_star == m2.state.beta_star);
  CHECK(m.x_stats.mean == m2.x_stats.mean);
  CHECK(m.x_stats.sd == m2.x_stats.sd);
  CHECK(m.tuning.lambda == m2.tuning.lambda);
  CHECK(m.support_threshold == m2.support_threshold);
}

TEST_CASE("cmd_fit: reruns are byte-identical apart from the timestamp") {
  const fs::path dir = temp_dir("fit_det");
  const fs::path csv = dir / "data.csv";
  write_hetero_csv(csv, 100, 67);

  FitPayload payload;
  payload.data_path = csv.string();
  payload.schema = hetero_schema();
  payload.estimator = {false, 2};
  payload.split = SplitConfig{0.25, 77};

  CliContext ctx1, ctx2;
  ctx1.out_dir = (dir / "a").string();
  ctx2.out_dir = (dir / "b").string();
  cmd_fit(payload, ctx1);
  cmd_fit(payload, ctx2);
  CHECK(without_timestamp(read_file(dir / "a" / "fit_report.txt")) ==
        without_timestamp(read_file(dir / "b" / "fit_report.txt")));
  CHECK(read_file(dir / "a" / "model.json") == read_file(dir / "b" / "model.json"));
}

TEST_CASE("cmd_fit: homoscedastic data yields an empty beta support") {
  const fs::path dir = temp_dir("fit_homo");
  const fs::path csv = dir / "data.csv";
  write_hetero_csv(csv, 400, 71, /*beta=*/0.0);  // constant noise variance

  FitPayload payload;
  payload.data_path = csv.string();
  payload.schema = hetero_schema();
  payload.estimator = {false, 0};
  payload.support_threshold = 0.5;  // generous: ridge never returns exact zeros
  CliContext ctx;
  ctx.out_dir = dir.string();
  cmd_fit(payload, ctx);
  const std::string report = read_file(dir / "fit_report.txt");
  CHECK(report_value(report, "selected_predictors_beta") == 0.0);
  CHECK(report_value(report, "selected_predictors_alpha") == 2.0);
}

TEST_CASE("cmd_fit + cmd_predict: training MSPE and round-trip agree") {
  const fs::path dir = temp_dir("fit_predict");
  const fs::path csv = dir / "data.csv";
  write_hetero_csv(csv, 150, 73);

  FitPayload payload;
  payload.data_path = csv.string();
  payload.schema = hetero_schema();
  payload.estimator = {false, 2};
  CliContext ctx;
  ctx.out_dir = dir.string();
  cmd_fit(payload, ctx);

  PredictPayload pp;
  pp.model_path = (dir / "model.json").string();
  pp.data_path = csv.string();
  cmd_predict(pp, ctx);

  const double train_mspe = report_value(read_file(dir / "fit_report.txt"), "training_mspe");
  const double predict_mspe = report_value(read_file(dir / "predict_summary.txt"), "mspe");
  CHECK(train_mspe == predict_mspe);  // same code path, bit-identical

  // in-process predictions equal the loaded-model predictions to the last bit
  const ModelArtifact m = load_model(pp.model_path);
  const RawDesign design = read_design_file(csv.string(), m.schema);
  const Predictions direct = apply_model(m, design.x, design.z);
  const CsvTable written = read_csv((dir / "predictions.csv").string());
  for (std::size_t i = 0; i < direct.mean.size(); ++i) {
    CHECK(format_double(direct.mean[i]) == written.rows[i][1]);
    CHECK(format_double(direct.variance[i]) == written.rows[i][2]);
  }
}

TEST_CASE("cmd_predict: zero model predicts mean 0 and variance 1") {
  const fs::path dir = temp_dir("predict_zero");
  const fs::path csv = dir / "data.csv";
  write_hetero_csv(csv, 30, 79);

  ModelArtifact m;
  m.state.alpha = Vector{0.0, 0.0};
  m.state.beta_star = Vector{0.0, 0.0, 0.0};
  m.tuning = TuningSchedule::scalars(2, 2, 0, 0, 0, 0);
  m.schema = hetero_schema();
  save_model(m, (dir / "zero.json").string());

  PredictPayload pp;
  pp.model_path = (dir / "zero.json").string();
  pp.data_path = csv.string();
  CliContext ctx;
  ctx.out_dir = dir.string();
  cmd_predict(pp, ctx);
  const CsvTable t = read_csv((dir / "predictions.csv").string());
  for (const auto& row : t.rows) {
    CHECK(row[1] == "0");
    CHECK(row[2] == "1");
  }

  // schema mismatch: a file without the trained columns
  write_file(dir / "other.csv", "y,a,b\n1,2,3\n4,5,6\n");
  pp.data_path = (dir / "other.csv").string();
  CHECK_THROWS_AS(cmd_predict(pp, ctx), SchemaMismatch);
}

TEST_CASE("cmd_cv: singleton grid wins and the criterion is echoed") {
  const fs::path dir = temp_dir("cv_single");
  const fs::path csv = dir / "data.csv";
  write_hetero_csv(csv, 90, 83);

  CvPayload payload;
  payload.data_path = csv.string();
  payload.schema = hetero_schema();
  payload.estimator = {false, 1};
  payload.grid.psi_values = {2.5};
  payload.grid.omega_values = {1.0};
  payload.grid.lambda_values = {0.5};
  payload.grid.gamma_values = {0.5};
  payload.plan.folds = 3;
  payload.plan.criterion = SpeCriterion::median_spe;
  CliContext ctx;
  ctx.out_dir = dir.string();
  cmd_cv(payload, ctx);

  const CsvTable t = read_csv((dir / "cv_table.csv").string());
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][t.column_index("psi")] == "2.5");
  CHECK(t.rows[0][t.column_index("criterion")] == "median_spe");

  const std::string best = read_file(dir / "best_tuning.json");
  CHECK(best.find("\"psi\": 2.5") != std::string::npos);
  CHECK(best.find("median_spe") != std::string::npos);
}

TEST_CASE("cmd_cv: an absurd penalty loses to a sane one") {
  const fs::path dir = temp_dir("cv_absurd");
  const fs::path csv = dir / "data.csv";
  write_hetero_csv(csv, 150, 89);

  CvPayload payload;
  payload.data_path = csv.string();
  payload.schema = hetero_schema();
  payload.estimator = {false, 1};
  payload.grid.psi_values = {1.0, 1e12};
  payload.grid.omega_values = {1.0};
  payload.grid.lambda_values = {0.5};
  payload.grid.gamma_values = {0.5};
  payload.plan.folds = 4;
  CliContext ctx;
  ctx.out_dir = dir.string();
  cmd_cv(payload, ctx);
  const std::string best = read_file(dir / "best_tuning.json");
  CHECK(best.find("\"psi\": 1.0") != std::string::npos);

  // the winner can be fed back into cmd_fit
  FitPayload fit;
  fit.data_path = csv.string();
  fit.schema = hetero_schema();
  fit.estimator = {false, 1};
  fit.tuning.source = TuningSource::file;
  fit.tuning.file = (dir / "best_tuning.json").string();
  cmd_fit(fit, ctx);
  const std::string report = read_file(dir / "fit_report.txt");
  CHECK(report.find("tuning_psi: 1\n") != std::string::npos);
}

TEST_CASE("cmd_diagnose: flags and spectra, plus residual QQ with a model") {
  const fs::path dir = temp_dir("diagnose");

  // orthonormal-style design: +-1 patterns have identical column norms
  std::ostringstream ss;
  ss << "y,x1,x2,z1\n";
  RngStream rng(97);
  for (int i = 0; i < 8; ++i)
    ss << format_double(rng.normal()) << ',' << ((i % 2 == 0) ? 1 : -1) << ','
       << ((i % 4 < 2) ? 1 : -1) << ',' << format_double(rng.normal()) << '\n';
  write_file(dir / "ortho.csv", ss.str());

  DiagnosePayload payload;
  payload.data_path = (dir / "ortho.csv").string();
  payload.schema.response_column = "y";
  payload.schema.mean_columns = {"x1", "x2"};
  payload.schema.variance_columns = {"z1"};
  CliContext ctx;
  ctx.out_dir = dir.string();
  cmd_diagnose(payload, ctx);
  std::string report = read_file(dir / "diagnostics.txt");
  CHECK(report_value(report, "x_gram_lambda_min") ==
        doctest::Approx(report_value(report, "x_gram_lambda_max")));
  CHECK(report.find("x_near_singular: false") != std::string::npos);

  // duplicated column trips the near-singularity flag
  std::ostringstream dup;
  dup << "y,x1,x2,z1\n";
  for (int i = 0; i < 8; ++i) {
    const double v = (i % 2 == 0) ? 1.0 : -1.0;
    dup << format_double(rng.normal()) << ',' << v << ',' << v << ','
        << format_double(rng.normal()) << '\n';
  }
  write_file(dir / "dup.csv", dup.str());
  payload.data_path = (dir / "dup.csv").string();
  cmd_diagnose(payload, ctx);
  report = read_file(dir / "diagnostics.txt");
  CHECK(report.find("x_near_singular: true") != std::string::npos);

  // with a model: residual QQ data lands next to the report
  const fs::path csv = dir / "data.csv";
  write_hetero_csv(csv, 120, 101);
  FitPayload fit;
  fit.data_path = csv.string();
  fit.schema = hetero_schema();
  fit.estimator = {false, 2};
  cmd_fit(fit, ctx);
  payload.data_path = csv.string();
  payload.schema = hetero_schema();
  payload.model_path = (dir / "model.json").string();
  cmd_diagnose(payload, ctx);
  const CsvTable qq = read_csv((dir / "residual_qq.csv").string());
  CHECK(qq.rows.size() == 120);
}

TEST_CASE("cmd_simulate: rerun with the same seed is byte-identical at 1 and 8 threads") {
  const fs::path dir = temp_dir("sim_det");
  SimulatePayload payload;
  SimulationSpec spec = SimulationSpec::defaults();
  spec.n = 120;
  spec.p = 6;
  spec.q = 6;
  spec.alpha0 = SimulationSpec::ramp_signal(6);
  spec.beta0 = SimulationSpec::ramp_signal(6);
  spec.trials = 10;
  spec.master_seed = 313;
  spec.estimators = {{false, 0}, {false, 2}, {true, 0}};
  spec.label = "det";
  payload.scenarios = {spec};
  payload.histogram_component = 4;

  const int saved = omp_get_max_threads();
  CliContext ctx;
  ctx.out_dir = (dir / "t1").string();
  omp_set_num_threads(1);
  cmd_simulate(payload, ctx);
  ctx.out_dir = (dir / "t1b").string();
  cmd_simulate(payload, ctx);
  ctx.out_dir = (dir / "t8").string();
  omp_set_num_threads(8);
  cmd_simulate(payload, ctx);
  omp_set_num_threads(saved);

  for (const char* name : {"metrics.csv", "histograms.csv", "qq.csv"}) {
    const std::string a = read_file(dir / "t1" / name);
    CHECK(a == read_file(dir / "t1b" / name));
    CHECK(a == read_file(dir / "t8" / name));
  }

  // single trial with k = 0 only: exactly one metrics row
  SimulatePayload tiny;
  SimulationSpec one = spec;
  one.trials = 1;
  one.estimators = {{false, 0}};
  tiny.scenarios = {one};
  ctx.out_dir = (dir / "tiny").string();
  cmd_simulate(tiny, ctx);
  CHECK(read_csv((dir / "tiny" / "metrics.csv").string()).rows.size() == 1);
}

}  // TEST_SUITE
