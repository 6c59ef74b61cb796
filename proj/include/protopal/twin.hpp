#pragma once

#include <map>
#include <string>
#include <vector>

#include "protopal/lvq.hpp"
#include "protopal/model.hpp"

namespace protopal {

/// Lifestyle feature name -> value in raw units (level index for ordinal).
using Assignments = std::map<std::string, double>;

/// Counterfactual copy of an individual: fixed features copied, intervenable
/// features set from the assignments, simulated features regenerated by the
/// source prototype's autoencoder and clamped to their domains.
struct DigitalTwin {
  std::string base_id;
  std::size_t prototype = 0;
  Label prototype_label = Label::healthy;
  Assignments adopted;
  Eigen::VectorXd values;  // raw units, schema order
  double risk_before = 0.0;
  double risk_after = 0.0;

  Individual to_individual() const { return Individual{base_id, values, {}}; }
};

/// Training rows (indices into the dataset) for each prototype's autoencoder:
/// its Voronoi cell, topped up with the k_min nearest participants when small.
std::vector<std::vector<std::size_t>> prototype_neighborhoods(const Eigen::MatrixXd& z, const PrototypeSet& set,
                                                              std::size_t k_min);

TrainedDiseaseModel fit_autoencoders(const CohortDataset& dataset, TrainedDiseaseModel model,
                                     const AutoencoderConfig& config = {});

DigitalTwin simulate(const Individual& individual, const Assignments& assignments, std::size_t prototype,
                     const TrainedDiseaseModel& model);

/// Complete lifestyle of a prototype, de-standardized and snapped to valid levels.
Assignments prototype_lifestyle(const TrainedDiseaseModel& model, std::size_t prototype);

struct TwinPair {
  std::size_t nearest_healthy = 0;
  std::size_t nearest_diseased = 0;
  DigitalTwin healthy;
  DigitalTwin diseased;
};

TwinPair make_full_twins(const Individual& individual, const TrainedDiseaseModel& model);

}  // namespace protopal
