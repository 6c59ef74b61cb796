#include "protopal/json_io.hpp"

#include <cmath>

namespace protopal {

using nlohmann::json;

json schema_json(const FeatureSchema& schema) {
  json j = json::parse(schema_to_json(schema));
  j["schema_hash"] = schema.hash();
  return j;
}

json to_json(const TrainingConfig& c) {
  return {{"prototypes_per_class", c.prototypes_per_class},
          {"tangent_dim", c.tangent_dim},
          {"lr_prototype", c.lr_prototype},
          {"lr_basis", c.lr_basis},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"measure", to_string(c.measure)},
          {"kmeans_iterations", c.kmeans_iterations}};
}

TrainingConfig training_config_from_json(const json& j, TrainingConfig c) {
  c.prototypes_per_class = j.value("prototypes_per_class", c.prototypes_per_class);
  c.tangent_dim = j.value("tangent_dim", c.tangent_dim);
  c.lr_prototype = j.value("lr_prototype", c.lr_prototype);
  c.lr_basis = j.value("lr_basis", c.lr_basis);
  c.epochs = j.value("epochs", c.epochs);
  c.seed = j.value("seed", c.seed);
  if (j.contains("measure")) c.measure = parse_measure(j.at("measure").get<std::string>());
  c.kmeans_iterations = j.value("kmeans_iterations", c.kmeans_iterations);
  return c;
}

json to_json(const AutoencoderConfig& c) {
  return {{"hidden", c.hidden},         {"noise", c.noise}, {"epochs", c.epochs},
          {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size}, {"seed", c.seed},
          {"k_min", c.k_min},           {"passes", c.passes}};
}

AutoencoderConfig autoencoder_config_from_json(const json& j, AutoencoderConfig c) {
  c.hidden = j.value("hidden", c.hidden);
  c.noise = j.value("noise", c.noise);
  c.epochs = j.value("epochs", c.epochs);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  c.k_min = j.value("k_min", c.k_min);
  c.passes = j.value("passes", c.passes);
  return c;
}

json values_json(const Eigen::VectorXd& values, const FeatureSchema& schema) {
  json j = json::object();
  for (std::size_t f = 0; f < schema.size(); ++f) j[schema[f].name] = values[static_cast<Eigen::Index>(f)];
  return j;
}

json assignments_json(const Assignments& a) {
  json j = json::object();
  for (const auto& [k, v] : a) j[k] = v;
  return j;
}

Individual individual_from_json(const json& j, const FeatureSchema& schema, const std::string& path) {
  if (!j.is_object()) throw RequestError(path, "expected an object");
  Individual ind;
  if (j.contains("id")) {
    if (!j["id"].is_string()) throw RequestError(path + ".id", "expected a string");
    ind.id = j["id"].get<std::string>();
  } else {
    ind.id = "query";
  }
  if (!j.contains("values") || !j["values"].is_object())
    throw RequestError(path + ".values", "expected an object of feature values");
  const json& values = j["values"];
  ind.values.resize(static_cast<Eigen::Index>(schema.size()));
  for (std::size_t f = 0; f < schema.size(); ++f) {
    const auto& spec = schema[f];
    const std::string field = path + ".values." + spec.name;
    if (!values.contains(spec.name)) throw RequestError(field, "missing feature");
    const json& v = values[spec.name];
    if (!v.is_number()) throw RequestError(field, "expected a number");
    double x = v.get<double>();
    if (!spec.domain.contains(x))
      throw RequestError(field, "value " + format_number(x) + " outside domain [" + format_number(spec.domain.lower()) +
                                    ", " + format_number(spec.domain.upper()) + "]");
    ind.values[static_cast<Eigen::Index>(f)] = x;
  }
  for (const auto& [name, _] : values.items())
    if (!schema.index_of(name)) throw RequestError(path + ".values." + name, "unknown feature");
  return ind;
}

Assignments assignments_from_json(const json& j, const std::string& path) {
  if (j.is_null()) return {};
  if (!j.is_object()) throw RequestError(path, "expected an object");
  Assignments a;
  for (const auto& [name, v] : j.items()) {
    if (!v.is_number()) throw RequestError(path + "." + name, "expected a number");
    a[name] = v.get<double>();
  }
  return a;
}

json to_json(const Neighborhood& hood) {
  json members = json::array();
  for (const auto& m : hood.members)
    members.push_back({{"index", m.index}, {"class", to_string(m.label)}, {"distance", m.distance}});
  return {{"radius", hood.radius}, {"members", members}};
}

json to_json(const DiseaseRisk& r) {
  return {{"disease", r.disease},
          {"name", r.name},
          {"risk", r.risk},
          {"nearest_diseased", r.nearest_diseased},
          {"nearest_healthy", r.nearest_healthy},
          {"neighborhood", to_json(r.neighborhood)}};
}

json to_json(const RiskReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) entries.push_back(to_json(e));
  return {{"risks", entries}, {"warnings", r.warnings}};
}

json to_json(const DigitalTwin& twin, const FeatureSchema& schema) {
  return {{"base_id", twin.base_id},
          {"prototype", twin.prototype},
          {"prototype_class", to_string(twin.prototype_label)},
          {"adopted", assignments_json(twin.adopted)},
          {"values", values_json(twin.values, schema)},
          {"risk_before", twin.risk_before},
          {"risk_after", twin.risk_after}};
}

json to_json(const Move& m) { return {{"feature", m.feature}, {"from", m.from}, {"to", m.to}}; }

json to_json(const HealthPlan& plan, const FeatureSchema& schema) {
  json steps = json::array();
  json trajectory = json::array({plan.initial_risk});
  for (const auto& s : plan.steps) {
    steps.push_back({{"move", to_json(s.move)},
                     {"risk_before", s.risk_before},
                     {"risk_after", s.risk_after},
                     {"twin", to_json(s.twin, schema)}});
    trajectory.push_back(s.risk_after);
  }
  return {{"target_prototype", plan.target_prototype},
          {"target_lifestyle", assignments_json(plan.target_lifestyle)},
          {"initial_risk", plan.initial_risk},
          {"steps", steps},
          {"risk_trajectory", trajectory},
          {"stop_reason", to_string(plan.stop_reason)}};
}

json to_json(const TrendExport& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row{{"kind", r.kind}, {"id", r.id}, {"class", to_string(r.label)}, {"values", r.values}};
    row["predicted"] = r.predicted ? json(to_string(*r.predicted)) : json(nullptr);
    row["correct"] = r.correct ? json(*r.correct) : json(nullptr);
    rows.push_back(std::move(row));
  }
  return {{"disease", t.disease}, {"features", t.features}, {"rows", rows}};
}

json to_json(const ComparisonTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row{{"icd10", r.disease}, {"disease", r.name}, {"available", r.available},
             {"n_test", r.n_test}, {"n_diseased", r.n_diseased}};
    if (r.available) {
      row["cox_auc"] = r.cox_auc;
      row["gtlvq_auc"] = r.gtlvq_auc;
      row["cox_c_index"] = r.cox_c_index ? json(*r.cox_c_index) : json(nullptr);
      row["gtlvq_c_index"] = r.gtlvq_c_index ? json(*r.gtlvq_c_index) : json(nullptr);
      row["winner"] = r.winner;
    } else {
      row["note"] = r.note;
    }
    rows.push_back(std::move(row));
  }
  return {{"rows", rows}, {"wins", {{"cox", t.cox_wins}, {"gtlvq", t.gtlvq_wins}, {"ties", t.ties}}}};
}

}  // namespace protopal
