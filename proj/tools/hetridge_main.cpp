#include <cstdio>
#include <exception>

#include <CLI11.hpp>
#include <omp.h>

#include "hetridge/commands.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config, "config file (JSON)")->required();
  sub->add_option("--out", args.out_dir, "output directory");
  sub->add_option("--seed", args.seed, "seed override")
      ->each([&args](const std::string&) { args.seed_set = true; });
  sub->add_option("--threads", args.threads, "OpenMP thread count (0 = library default)");
}

hetridge::CliContext make_context(const CommonArgs& args) {
  if (args.threads > 0) omp_set_num_threads(args.threads);
  hetridge::CliContext ctx;
  ctx.out_dir = args.out_dir;
  if (args.seed_set) ctx.seed_override = args.seed;
  return ctx;
}

// 0 success, 1 usage/config, 2 data, 3 numerical failure
int classify(const std::exception& e) {
  using namespace hetridge;
  if (dynamic_cast<const ConfigError*>(&e)) return 1;
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const MissingValue*>(&e) ||
      dynamic_cast<const ConstantVarianceColumn*>(&e) ||
      dynamic_cast<const SchemaMismatch*>(&e) ||
      dynamic_cast<const DimensionMismatch*>(&e) ||
      dynamic_cast<const InvalidFolds*>(&e))
    return 2;
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive-ridge estimation for heteroscedastic regression"};
  app.require_subcommand(1);

  CommonArgs fit_args, sim_args, cv_args, diag_args, pred_args;
  CLI::App* fit = app.add_subcommand("fit", "fit a model to a CSV file");
  CLI::App* simulate = app.add_subcommand("simulate", "run Monte-Carlo scenarios");
  CLI::App* cv = app.add_subcommand("cv", "cross-validated tuning search");
  CLI::App* diagnose = app.add_subcommand("diagnose", "design-matrix diagnostics");
  CLI::App* predict = app.add_subcommand("predict", "predict from a saved model");
  add_common(fit, fit_args);
  add_common(simulate, sim_args);
  add_common(cv, cv_args);
  add_common(diagnose, diag_args);
  add_common(predict, pred_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    using namespace hetridge;
    if (fit->parsed()) {
      const auto payload = parse_fit_payload(load_config_payload(fit_args.config, "fit"));
      cmd_fit(payload, make_context(fit_args));
    } else if (simulate->parsed()) {
      const auto payload =
          parse_simulate_payload(load_config_payload(sim_args.config, "simulate"));
      cmd_simulate(payload, make_context(sim_args));
    } else if (cv->parsed()) {
      const auto payload = parse_cv_payload(load_config_payload(cv_args.config, "cv"));
      cmd_cv(payload, make_context(cv_args));
    } else if (diagnose->parsed()) {
      const auto payload =
          parse_diagnose_payload(load_config_payload(diag_args.config, "diagnose"));
      cmd_diagnose(payload, make_context(diag_args));
    } else if (predict->parsed()) {
      const auto payload =
          parse_predict_payload(load_config_payload(pred_args.config, "predict"));
      cmd_predict(payload, make_context(pred_args));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return classify(e);
  }
  return 0;
}
