#pragma once

#include <random>
#include <string>

#include <json.hpp>

#include "protopal/bundle.hpp"
#include "protopal/evaluation.hpp"
#include "protopal/json_io.hpp"
#include "protopal/planner.hpp"
#include "protopal/risk.hpp"

namespace testdata {

using namespace protopal;
using nlohmann::json;

inline json individual_json(const Individual& ind, const FeatureSchema& schema) {
  return {{"id", ind.id}, {"values", values_json(ind.values, schema)}};
}

struct Request {
  std::string method, target;
  json body;
  json expected;
};

// A random request together with the in-process answer it must reproduce.
inline Request random_request(std::mt19937_64& rng, const ModelBundle& b, const CohortDataset& ds) {
  const auto& ind = ds[rng() % ds.size()];
  const auto& model = b.models[rng() % b.models.size()];
  json person = individual_json(ind, b.schema);
  switch (rng() % 6) {
    case 0:
      return {"POST", "/v1/risk", {{"individual", person}}, to_json(risk_report(ind, b.schema, b.models))};
    case 1: {
      auto report = score_disease(ind.values, model);
      json body{{"individual", person}, {"disease", model.disease}};
      return {"POST", "/v1/explain", body, json{{"risk", to_json(report)}}};
    }
    case 2: {
      Assignments a{{"exercise", static_cast<double>(rng() % 4)}, {"walking", static_cast<double>(rng() % 2)}};
      std::size_t p = rng() % model.prototypes.size();
      json body{{"individual", person}, {"disease", model.disease}, {"assignments", assignments_json(a)}, {"prototype", p}};
      return {"POST", "/v1/simulate", body, to_json(simulate(ind, a, p, model), b.schema)};
    }
    case 3: {
      PlannerConfig cfg;
      cfg.stop_policy = rng() % 2 ? StopPolicy::exhaust_all : StopPolicy::no_improvement;
      cfg.max_steps = 1 + rng() % 6;
      json body{{"individual", person}, {"disease", model.disease}, {"stop_policy", to_string(cfg.stop_policy)},
                {"max_steps", cfg.max_steps}};
      return {"POST", "/v1/plan", body, to_json(plan(ind, model, cfg), b.schema)};
    }
    case 4: {
      json trends = to_json(export_prototype_trends(model, {"glucose", "alcohol"}));
      trends["measure"] = to_string(model.prototypes.measure());
      return {"GET", "/v1/prototypes/" + model.disease + "?features=glucose,alcohol", json(), trends};
    }
    default:
      return {"GET", "/v1/schema", json(), schema_json(b.schema)};
  }
}

// Explain responses carry more than the risk block; compare the shared part.
inline bool matches(const Request& r, const json& got) {
  if (r.target == "/v1/explain") return got.at("risk") == r.expected.at("risk");
  return got == r.expected;
}

inline std::string body_text(const Request& r) { return r.body.is_null() ? std::string() : r.body.dump(); }

}  // namespace testdata
