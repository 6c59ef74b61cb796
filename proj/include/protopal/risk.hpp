#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "protopal/model.hpp"

namespace protopal {

/// Distances are floored at this value before inversion, so an exact hit on a
/// lone diseased prototype drives the risk to 1 instead of dividing by zero.
inline constexpr double kDistanceFloor = 1e-12;

struct NeighborMember {
  std::size_t index = 0;
  Label label = Label::healthy;
  double distance = 0.0;
};

/// Smallest ball around x (in the model's squared distance) containing at
/// least one prototype of each class. Members are in prototype order.
struct Neighborhood {
  double radius = 0.0;
  std::vector<NeighborMember> members;
};

Neighborhood neighborhood(const Eigen::VectorXd& x, const PrototypeSet& set);

/// Inverse-distance share of diseased mass over the neighborhood members.
double risk_score(const Neighborhood& hood);
double risk_score(const Eigen::VectorXd& x, const PrototypeSet& set);

struct DiseaseRisk {
  std::string disease;
  std::string name;
  double risk = 0.0;
  std::size_t nearest_diseased = 0;
  std::size_t nearest_healthy = 0;
  Neighborhood neighborhood;
};

struct RiskReport {
  std::vector<DiseaseRisk> entries;  // descending risk
  std::vector<std::string> warnings;
};

/// Scores one individual (raw units) against every model. Models whose schema
/// hash differs from `schema` are skipped with a warning entry.
RiskReport risk_report(const Individual& individual, const FeatureSchema& schema,
                       std::span<const TrainedDiseaseModel> models);

DiseaseRisk score_disease(const Eigen::VectorXd& raw_values, const TrainedDiseaseModel& model);

}  // namespace protopal
