#include "protopal/risk.hpp"

#include <algorithm>
#include <limits>

namespace protopal {

Neighborhood neighborhood(const Eigen::VectorXd& x, const PrototypeSet& set) {
  if (!set.has_both_classes()) throw Error("risk requires prototypes of both classes");
  Eigen::VectorXd dist = set.distances(x);
  double min_d = std::numeric_limits<double>::infinity(), min_h = min_d;
  for (std::size_t j = 0; j < set.size(); ++j) {
    double dj = dist[static_cast<Eigen::Index>(j)];
    if (set[j].label == Label::diseased) min_d = std::min(min_d, dj);
    else min_h = std::min(min_h, dj);
  }
  Neighborhood hood;
  hood.radius = std::max(min_d, min_h);
  for (std::size_t j = 0; j < set.size(); ++j) {
    double dj = dist[static_cast<Eigen::Index>(j)];
    if (dj <= hood.radius) hood.members.push_back({j, set[j].label, dj});
  }
  return hood;
}

double risk_score(const Neighborhood& hood) {
  double diseased = 0.0, total = 0.0;
  for (const auto& m : hood.members) {
    double weight = 1.0 / std::max(m.distance, kDistanceFloor);
    total += weight;
    if (m.label == Label::diseased) diseased += weight;
  }
  if (!(total > 0.0)) throw Error("empty neighborhood");
  return diseased / total;
}

double risk_score(const Eigen::VectorXd& x, const PrototypeSet& set) { return risk_score(neighborhood(x, set)); }

DiseaseRisk score_disease(const Eigen::VectorXd& raw_values, const TrainedDiseaseModel& model) {
  Eigen::VectorXd z = model.standardize(raw_values);
  DiseaseRisk r;
  r.disease = model.disease;
  r.name = model.name;
  r.neighborhood = neighborhood(z, model.prototypes);
  r.risk = risk_score(r.neighborhood);
  r.nearest_diseased = nearest_of_class(z, model.prototypes, Label::diseased);
  r.nearest_healthy = nearest_of_class(z, model.prototypes, Label::healthy);
  return r;
}

RiskReport risk_report(const Individual& individual, const FeatureSchema& schema,
                       std::span<const TrainedDiseaseModel> models) {
  RiskReport report;
  const std::string hash = schema.hash();
  for (const auto& model : models) {
    if (model.schema_hash != hash) {
      report.warnings.push_back(model.disease + ": schema hash mismatch (model " + model.schema_hash +
                                ", individual " + hash + "); skipped");
      continue;
    }
    report.entries.push_back(score_disease(individual.values, model));
  }
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const DiseaseRisk& a, const DiseaseRisk& b) { return a.risk > b.risk; });
  return report;
}

}  // namespace protopal
