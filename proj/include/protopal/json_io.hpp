#pragma once

#include <string>

#include <json.hpp>

#include "protopal/evaluation.hpp"
#include "protopal/planner.hpp"
#include "protopal/risk.hpp"
#include "protopal/twin.hpp"

// JSON views of the domain types, shared by the bundle format and the API.

namespace protopal {

/// Malformed request content; `field` names the offending JSON path.
class RequestError : public Error {
 public:
  RequestError(std::string field, const std::string& what) : Error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

nlohmann::json schema_json(const FeatureSchema& schema);

nlohmann::json to_json(const TrainingConfig& c);
TrainingConfig training_config_from_json(const nlohmann::json& j, TrainingConfig base = {});
nlohmann::json to_json(const AutoencoderConfig& c);
AutoencoderConfig autoencoder_config_from_json(const nlohmann::json& j, AutoencoderConfig base = {});

/// Raw feature vector as {name: value}.
nlohmann::json values_json(const Eigen::VectorXd& values, const FeatureSchema& schema);
nlohmann::json assignments_json(const Assignments& a);

/// Parses {"id": ..., "values": {name: number}} in raw units; every schema
/// feature must be present and inside its domain.
Individual individual_from_json(const nlohmann::json& j, const FeatureSchema& schema, const std::string& path = "individual");
Assignments assignments_from_json(const nlohmann::json& j, const std::string& path = "assignments");

nlohmann::json to_json(const Neighborhood& hood);
nlohmann::json to_json(const DiseaseRisk& r);
nlohmann::json to_json(const RiskReport& r);
nlohmann::json to_json(const DigitalTwin& twin, const FeatureSchema& schema);
nlohmann::json to_json(const Move& m);
nlohmann::json to_json(const HealthPlan& plan, const FeatureSchema& schema);
nlohmann::json to_json(const TrendExport& t);
nlohmann::json to_json(const ComparisonTable& t);

}  // namespace protopal
