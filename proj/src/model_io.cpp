#include "hetridge/model_io.hpp"

#include <fstream>

#include <json.hpp>

namespace hetridge {

using nlohmann::json;

namespace {

json vec_to_json(const Vector& v) { return json(v); }

Vector vec_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError("model: '" + what + "' must be an array");
  Vector v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) throw ParseError("model: '" + what + "' has a non-numeric entry");
    v.push_back(e.get<double>());
  }
  return v;
}

}  // namespace

void save_model(const ModelArtifact& m, const std::string& path) {
  json j;
  j["format_version"] = m.format_version;
  j["alpha"] = vec_to_json(m.state.alpha);
  j["beta_star"] = vec_to_json(m.state.beta_star);
  j["iteration"] = m.state.iteration;
  j["bar"] = m.bar;
  j["converged"] = m.converged;
  j["standardize"] = m.standardize;
  j["center_response"] = m.center_response;
  j["x_mean"] = vec_to_json(m.x_stats.mean);
  j["x_sd"] = vec_to_json(m.x_stats.sd);
  j["z_mean"] = vec_to_json(m.z_stats.mean);
  j["z_sd"] = vec_to_json(m.z_stats.sd);
  j["y_offset"] = m.y_offset;
  j["tuning"] = {{"psi", vec_to_json(m.tuning.psi)},
                 {"omega", vec_to_json(m.tuning.omega)},
                 {"lambda", vec_to_json(m.tuning.lambda)},
                 {"gamma", vec_to_json(m.tuning.gamma)}};
  j["options"] = {{"stabilization", to_string(m.options.stabilization)},
                  {"delta_alpha", m.options.delta_alpha},
                  {"delta_beta", m.options.delta_beta},
                  {"bar_tolerance", m.options.bar_tolerance},
                  {"bar_max_iterations", m.options.bar_max_iterations},
                  {"divergence_bound", m.options.divergence_bound},
                  {"k", m.options.k}};
  j["schema"] = {{"response_column", m.schema.response_column},
                 {"mean_columns", m.schema.mean_columns},
                 {"variance_columns", m.schema.variance_columns}};
  j["support_threshold"] = m.support_threshold;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << j.dump(2) << '\n';
}

ModelArtifact load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("model file " + path + ": " + e.what());
  }
  ModelArtifact m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kModelFormatVersion)
      throw SchemaMismatch("model format_version " + std::to_string(m.format_version) +
                           " is not supported");
    m.state.alpha = vec_from_json(j.at("alpha"), "alpha");
    m.state.beta_star = vec_from_json(j.at("beta_star"), "beta_star");
    m.state.iteration = j.at("iteration").get<int>();
    m.bar = j.at("bar").get<bool>();
    m.converged = j.at("converged").get<bool>();
    m.standardize = j.at("standardize").get<bool>();
    m.center_response = j.at("center_response").get<bool>();
    m.x_stats.mean = vec_from_json(j.at("x_mean"), "x_mean");
    m.x_stats.sd = vec_from_json(j.at("x_sd"), "x_sd");
    m.z_stats.mean = vec_from_json(j.at("z_mean"), "z_mean");
    m.z_stats.sd = vec_from_json(j.at("z_sd"), "z_sd");
    m.y_offset = j.at("y_offset").get<double>();
    const json& t = j.at("tuning");
    m.tuning.psi = vec_from_json(t.at("psi"), "tuning.psi");
    m.tuning.omega = vec_from_json(t.at("omega"), "tuning.omega");
    m.tuning.lambda = vec_from_json(t.at("lambda"), "tuning.lambda");
    m.tuning.gamma = vec_from_json(t.at("gamma"), "tuning.gamma");
    const json& o = j.at("options");
    m.options.stabilization = stabilization_from_string(o.at("stabilization").get<std::string>());
    m.options.delta_alpha = o.at("delta_alpha").get<double>();
    m.options.delta_beta = o.at("delta_beta").get<double>();
    m.options.bar_tolerance = o.at("bar_tolerance").get<double>();
    m.options.bar_max_iterations = o.at("bar_max_iterations").get<int>();
    m.options.divergence_bound = o.at("divergence_bound").get<double>();
    m.options.k = o.at("k").get<int>();
    m.options.bar = m.bar;
    const json& s = j.at("schema");
    m.schema.response_column = s.at("response_column").get<std::string>();
    m.schema.mean_columns = s.at("mean_columns").get<std::vector<std::string>>();
    m.schema.variance_columns = s.at("variance_columns").get<std::vector<std::string>>();
    m.support_threshold = j.at("support_threshold").get<double>();
  } catch (const json::exception& e) {
    throw ParseError("model file " + path + ": " + e.what());
  }
  return m;
}

}  // namespace hetridge
