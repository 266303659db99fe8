#include "hetridge/config.hpp"

#include <algorithm>
#include <fstream>

namespace hetridge {

using nlohmann::json;

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& context) {
  if (!obj.is_object()) throw ConfigError(context + ": expected an object");
  for (const auto& item : obj.items())
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw ConfigError("unknown key '" + item.key() + "' in " + context);
}

namespace {

const json& require(const json& obj, const std::string& key, const std::string& context) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing key '" + key + "' in " + context);
  return *it;
}

double number_at(const json& obj, const std::string& key, const std::string& context) {
  const json& v = require(obj, key, context);
  if (!v.is_number()) throw ConfigError("'" + key + "' in " + context + " must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback,
                 const std::string& context) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ConfigError("'" + key + "' in " + context + " must be a number");
  return it->get<double>();
}

std::uint64_t uint_or(const json& obj, const std::string& key, std::uint64_t fallback,
                      const std::string& context) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_unsigned() && !it->is_number_integer())
    throw ConfigError("'" + key + "' in " + context + " must be an integer");
  return it->get<std::uint64_t>();
}

bool bool_or(const json& obj, const std::string& key, bool fallback,
             const std::string& context) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError("'" + key + "' in " + context + " must be a boolean");
  return it->get<bool>();
}

std::string string_at(const json& obj, const std::string& key, const std::string& context) {
  const json& v = require(obj, key, context);
  if (!v.is_string()) throw ConfigError("'" + key + "' in " + context + " must be a string");
  return v.get<std::string>();
}

Vector vector_at(const json& v, const std::string& context) {
  if (v.is_number()) return Vector{v.get<double>()};
  if (!v.is_array()) throw ConfigError(context + " must be a number or an array of numbers");
  Vector out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(context + " has a non-numeric entry");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::string> string_list_at(const json& obj, const std::string& key,
                                        const std::string& context) {
  const json& v = require(obj, key, context);
  if (!v.is_array()) throw ConfigError("'" + key + "' in " + context + " must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string())
      throw ConfigError("'" + key + "' in " + context + " must contain strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::pair<std::string, DataFileSchema> parse_data_block(const json& j,
                                                        const std::string& context) {
  const json& d = require(j, "data", context);
  require_keys(d, {"path", "response_column", "mean_columns", "variance_columns"},
               context + ".data");
  DataFileSchema schema;
  schema.response_column = string_at(d, "response_column", context + ".data");
  schema.mean_columns = string_list_at(d, "mean_columns", context + ".data");
  const auto it = d.find("variance_columns");
  if (it != d.end()) schema.variance_columns = string_list_at(d, "variance_columns", context + ".data");
  schema.validate();
  return {string_at(d, "path", context + ".data"), schema};
}

EstimatorChoice parse_estimator(const json& j, const std::string& context) {
  const json& e = require(j, "estimator", context);
  require_keys(e, {"type", "k"}, context + ".estimator");
  const std::string type = string_at(e, "type", context + ".estimator");
  EstimatorChoice choice;
  if (type == "bar") {
    choice.bar = true;
    if (e.contains("k")) throw ConfigError("'k' is not valid for the bar estimator");
  } else if (type == "ar") {
    choice.bar = false;
    const double k = number_at(e, "k", context + ".estimator");
    if (k < 0 || k != std::floor(k)) throw ConfigError("estimator k must be a non-negative integer");
    choice.k = static_cast<int>(k);
  } else {
    throw ConfigError("estimator type must be 'ar' or 'bar', got '" + type + "'");
  }
  return choice;
}

FitOptions parse_options(const json& j, const std::string& context) {
  FitOptions o;
  const auto it = j.find("options");
  if (it == j.end()) return o;
  const json& v = *it;
  require_keys(v,
               {"stabilization", "delta_alpha", "delta_beta", "bar_tolerance",
                "bar_max_iterations", "divergence_bound"},
               context + ".options");
  if (v.contains("stabilization"))
    o.stabilization = stabilization_from_string(string_at(v, "stabilization", context));
  o.delta_alpha = number_or(v, "delta_alpha", o.delta_alpha, context);
  o.delta_beta = number_or(v, "delta_beta", o.delta_beta, context);
  o.bar_tolerance = number_or(v, "bar_tolerance", o.bar_tolerance, context);
  o.bar_max_iterations =
      static_cast<int>(number_or(v, "bar_max_iterations", o.bar_max_iterations, context));
  o.divergence_bound = number_or(v, "divergence_bound", o.divergence_bound, context);
  if (o.stabilization == Stabilization::perturbed && (o.delta_alpha <= 0 || o.delta_beta <= 0))
    throw ConfigError("perturbed stabilization requires delta_alpha, delta_beta > 0");
  if (!(o.bar_tolerance > 0)) throw ConfigError("bar_tolerance must be > 0");
  if (o.bar_max_iterations < 1) throw ConfigError("bar_max_iterations must be >= 1");
  if (!(o.divergence_bound > 0)) throw ConfigError("divergence_bound must be > 0");
  return o;
}

TuningConfig parse_tuning(const json& j, const std::string& context) {
  TuningConfig cfg;
  const auto it = j.find("tuning");
  if (it == j.end()) return cfg;  // rate_default
  const json& v = *it;
  require_keys(v, {"rule", "file", "psi", "omega", "lambda", "gamma"}, context + ".tuning");
  if (v.contains("rule")) {
    const std::string rule = string_at(v, "rule", context + ".tuning");
    if (rule != "rate_default")
      throw ConfigError("unknown tuning rule '" + rule + "' (only 'rate_default')");
    if (v.size() != 1) throw ConfigError("tuning rule cannot be combined with other keys");
    return cfg;
  }
  if (v.contains("file")) {
    if (v.size() != 1) throw ConfigError("tuning file cannot be combined with other keys");
    cfg.source = TuningSource::file;
    cfg.file = string_at(v, "file", context + ".tuning");
    return cfg;
  }
  cfg.source = TuningSource::values;
  cfg.psi = vector_at(require(v, "psi", context + ".tuning"), context + ".tuning.psi");
  cfg.omega = vector_at(require(v, "omega", context + ".tuning"), context + ".tuning.omega");
  cfg.lambda = vector_at(require(v, "lambda", context + ".tuning"), context + ".tuning.lambda");
  cfg.gamma = vector_at(require(v, "gamma", context + ".tuning"), context + ".tuning.gamma");
  return cfg;
}

NoiseKind parse_noise(const json& j, const std::string& context) {
  const auto it = j.find("noise");
  if (it == j.end()) return NoiseKind{};
  require_keys(*it, {"family", "standardize_variance"}, context + ".noise");
  const std::string family = string_at(*it, "family", context + ".noise");
  const bool standardize = bool_or(*it, "standardize_variance", false, context + ".noise");
  return parse_noise_family(family, standardize);
}

}  // namespace

nlohmann::json load_config_payload(const std::string& path, const std::string& subcommand) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  require_keys(j, {"format_version", subcommand}, "config");
  const double version = number_at(j, "format_version", "config");
  if (version != kConfigFormatVersion)
    throw ConfigError("config format_version must be " + std::to_string(kConfigFormatVersion));
  return require(j, subcommand, "config");
}

TuningSchedule resolve_tuning(const TuningConfig& cfg, std::size_t n, std::size_t p,
                              std::size_t q) {
  switch (cfg.source) {
    case TuningSource::rate_default:
      return TuningSchedule::rate_default(n, p, q);
    case TuningSource::file: {
      std::ifstream in(cfg.file);
      if (!in) throw ConfigError("cannot open tuning file: " + cfg.file);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw ConfigError("tuning file " + cfg.file + ": " + e.what());
      }
      require_keys(j, {"format_version", "psi", "omega", "lambda", "gamma", "score",
                       "criterion", "estimator"},
                   "tuning file");
      return TuningSchedule::scalars(p, q, number_at(j, "psi", "tuning file"),
                                     number_at(j, "omega", "tuning file"),
                                     number_at(j, "lambda", "tuning file"),
                                     number_at(j, "gamma", "tuning file"));
    }
    case TuningSource::values: {
      const auto expand = [](const Vector& v, std::size_t len, const char* what) {
        if (v.size() == 1) return Vector(len, v[0]);
        if (v.size() != len)
          throw ConfigError(std::string("tuning '") + what + "' must be a scalar or have length " +
                            std::to_string(len));
        return v;
      };
      TuningSchedule t;
      t.psi = expand(cfg.psi, p, "psi");
      t.omega = expand(cfg.omega, q + 1, "omega");
      t.lambda = expand(cfg.lambda, p, "lambda");
      t.gamma = expand(cfg.gamma, q + 1, "gamma");
      t.validate(p, q);
      return t;
    }
  }
  throw ConfigError("unreachable tuning source");
}

FitPayload parse_fit_payload(const json& j) {
  require_keys(j,
               {"data", "standardize", "center_response", "estimator", "tuning", "options",
                "split", "support_threshold"},
               "fit");
  FitPayload p;
  std::tie(p.data_path, p.schema) = parse_data_block(j, "fit");
  p.standardize = bool_or(j, "standardize", true, "fit");
  p.center_response = bool_or(j, "center_response", false, "fit");
  p.estimator = parse_estimator(j, "fit");
  p.tuning = parse_tuning(j, "fit");
  p.options = parse_options(j, "fit");
  if (j.contains("split")) {
    const json& s = j["split"];
    require_keys(s, {"test_fraction", "seed"}, "fit.split");
    SplitConfig split;
    split.test_fraction = number_at(s, "test_fraction", "fit.split");
    if (!(split.test_fraction > 0.0 && split.test_fraction < 1.0))
      throw ConfigError("fit.split.test_fraction must be in (0, 1)");
    split.seed = uint_or(s, "seed", 0, "fit.split");
    p.split = split;
  }
  p.support_threshold = number_or(j, "support_threshold", 1e-4, "fit");
  if (!(p.support_threshold > 0)) throw ConfigError("support_threshold must be > 0");
  return p;
}

SimulatePayload parse_simulate_payload(const json& j) {
  require_keys(j,
               {"scenarios", "histogram_bins", "histogram_component", "qq_component",
                "support_threshold"},
               "simulate");
  SimulatePayload p;
  const json& scenarios = require(j, "scenarios", "simulate");
  if (!scenarios.is_array() || scenarios.empty())
    throw ConfigError("simulate.scenarios must be a non-empty array");
  std::size_t index = 0;
  for (const json& s : scenarios) {
    const std::string ctx = "simulate.scenarios[" + std::to_string(index) + "]";
    require_keys(s,
                 {"label", "n", "p", "q", "rho", "alpha0", "beta0", "noise", "trials",
                  "master_seed", "estimators", "tuning", "options"},
                 ctx);
    SimulationSpec spec;
    spec.n = static_cast<std::size_t>(number_or(s, "n", 1000, ctx));
    spec.p = static_cast<std::size_t>(number_or(s, "p", 20, ctx));
    spec.q = static_cast<std::size_t>(number_or(s, "q", 20, ctx));
    spec.rho = number_or(s, "rho", 0.4, ctx);
    spec.alpha0 = s.contains("alpha0") ? vector_at(s["alpha0"], ctx + ".alpha0")
                                       : SimulationSpec::ramp_signal(spec.p);
    spec.beta0 = s.contains("beta0") ? vector_at(s["beta0"], ctx + ".beta0")
                                     : SimulationSpec::ramp_signal(spec.q);
    spec.noise = parse_noise(s, ctx);
    spec.trials = static_cast<std::size_t>(number_or(s, "trials", 200, ctx));
    if (spec.trials < 1) throw ConfigError(ctx + ": trials must be >= 1");
    spec.master_seed = uint_or(s, "master_seed", 1, ctx);
    spec.label = s.contains("label") ? string_at(s, "label", ctx)
                                     : "s" + std::to_string(index);
    const json& ests = require(s, "estimators", ctx);
    if (!ests.is_array() || ests.empty())
      throw ConfigError(ctx + ".estimators must be a non-empty array");
    for (const json& e : ests) {
      json wrapper;
      wrapper["estimator"] = e;
      spec.estimators.push_back(parse_estimator(wrapper, ctx));
    }
    const TuningConfig tc = parse_tuning(s, ctx);
    if (tc.source == TuningSource::values) {
      const TuningSchedule ts = resolve_tuning(tc, spec.n, spec.p, spec.q);
      spec.tuning = ScalarTuning{ts.psi[0], ts.omega[0], ts.lambda[0], ts.gamma[0]};
      // run_trials uses one scalar per axis; reject full diagonals here
      for (const Vector* v : {&ts.psi, &ts.omega, &ts.lambda, &ts.gamma})
        for (double x : *v)
          if (x != (*v)[0])
            throw ConfigError(ctx + ": simulation tuning must be scalar per axis");
    } else if (tc.source == TuningSource::file) {
      throw ConfigError(ctx + ": tuning files are not supported in simulate");
    }
    spec.fit_options = parse_options(s, ctx);
    p.scenarios.push_back(std::move(spec));
    ++index;
  }
  p.histogram_bins = static_cast<std::size_t>(number_or(j, "histogram_bins", 40, "simulate"));
  if (p.histogram_bins < 1) throw ConfigError("simulate.histogram_bins must be >= 1");
  p.histogram_component =
      static_cast<std::size_t>(number_or(j, "histogram_component", 10, "simulate"));
  p.qq_component = static_cast<std::size_t>(number_or(j, "qq_component", 0, "simulate"));
  p.support_threshold = number_or(j, "support_threshold", 1e-4, "simulate");
  if (!(p.support_threshold > 0)) throw ConfigError("support_threshold must be > 0");
  return p;
}

CvPayload parse_cv_payload(const json& j) {
  require_keys(j,
               {"data", "standardize", "fold_local", "center_response", "estimator",
                "options", "grid", "stages", "plan"},
               "cv");
  CvPayload p;
  std::tie(p.data_path, p.schema) = parse_data_block(j, "cv");
  p.cv_options.standardize = bool_or(j, "standardize", true, "cv");
  p.cv_options.fold_local = bool_or(j, "fold_local", true, "cv");
  p.cv_options.center_response = bool_or(j, "center_response", false, "cv");
  p.estimator = parse_estimator(j, "cv");
  p.options = parse_options(j, "cv");

  const json& g = require(j, "grid", "cv");
  require_keys(g, {"psi", "omega", "lambda", "gamma"}, "cv.grid");
  if (g.contains("psi")) p.grid.psi_values = vector_at(g["psi"], "cv.grid.psi");
  if (g.contains("omega")) p.grid.omega_values = vector_at(g["omega"], "cv.grid.omega");
  if (g.contains("lambda")) p.grid.lambda_values = vector_at(g["lambda"], "cv.grid.lambda");
  if (g.contains("gamma")) p.grid.gamma_values = vector_at(g["gamma"], "cv.grid.gamma");

  if (j.contains("stages")) {
    const json& stages = j["stages"];
    if (!stages.is_array()) throw ConfigError("cv.stages must be an array of arrays");
    for (const json& st : stages) {
      if (!st.is_array()) throw ConfigError("cv.stages entries must be arrays of axis names");
      Stage stage;
      for (const json& a : st) {
        if (!a.is_string()) throw ConfigError("cv.stages axis names must be strings");
        stage.push_back(axis_from_string(a.get<std::string>()));
      }
      p.stages.push_back(std::move(stage));
    }
  }

  if (j.contains("plan")) {
    const json& pl = j["plan"];
    require_keys(pl, {"folds", "criterion", "shuffle_seed"}, "cv.plan");
    p.plan.folds = static_cast<std::size_t>(number_or(pl, "folds", 5, "cv.plan"));
    if (pl.contains("criterion"))
      p.plan.criterion = spe_criterion_from_string(string_at(pl, "criterion", "cv.plan"));
    p.plan.shuffle_seed = uint_or(pl, "shuffle_seed", 0, "cv.plan");
  }
  return p;
}

DiagnosePayload parse_diagnose_payload(const json& j) {
  require_keys(j, {"data", "standardize", "model"}, "diagnose");
  DiagnosePayload p;
  std::tie(p.data_path, p.schema) = parse_data_block(j, "diagnose");
  p.standardize = bool_or(j, "standardize", false, "diagnose");
  if (j.contains("model")) p.model_path = string_at(j, "model", "diagnose");
  return p;
}

PredictPayload parse_predict_payload(const json& j) {
  require_keys(j, {"model", "data"}, "predict");
  PredictPayload p;
  p.model_path = string_at(j, "model", "predict");
  const json& d = require(j, "data", "predict");
  if (d.is_string()) {
    p.data_path = d.get<std::string>();
  } else {
    throw ConfigError("predict.data must be a path string (the schema comes from the model)");
  }
  return p;
}

}  // namespace hetridge
