#pragma once

#include <string>
#include <vector>

#include "protopal/autoencoder.hpp"
#include "protopal/prototypes.hpp"
#include "protopal/schema.hpp"
#include "protopal/standardizer.hpp"

namespace protopal {

struct TrainingConfig {
  std::size_t prototypes_per_class = 5;
  Eigen::Index tangent_dim = 2;
  double lr_prototype = 0.01;
  double lr_basis = 0.001;  // also used for the relevance matrix
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  Measure measure = Measure::tangent;
  std::size_t kmeans_iterations = 10;

  /// Throws TrainingError unless rates are positive and the tangent
  /// dimension fits the feature dimension `dim`.
  void validate(Eigen::Index dim) const;
};

struct TrainingMetadata {
  TrainingConfig config;
  std::vector<double> cost_history;  // entry 0 is the cost at initialization
  double final_cost = 0.0;
  std::size_t n_train = 0;
  AutoencoderConfig autoencoder;
};

/// Everything needed to score and simulate one disease.
struct TrainedDiseaseModel {
  std::string disease;  // ICD-10 code
  std::string name;
  FeatureSchema schema;
  std::string schema_hash;
  Standardizer standardizer;
  PrototypeSet prototypes;
  std::vector<DenoisingAutoencoder> autoencoders;  // empty until fitted
  TrainingMetadata metadata;

  bool autoencoders_fitted() const { return !autoencoders.empty() && autoencoders.size() == prototypes.size(); }
  Eigen::VectorXd standardize(const Eigen::VectorXd& raw) const { return standardizer.apply(raw); }
};

}  // namespace protopal
