#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "protopal/schema.hpp"

namespace protopal {

/// Raw-unit location and spread used when drawing a feature. For binary
/// features `mean` is the prevalence and `sd` is ignored.
struct FeatureProfile {
  double mean = 0.0;
  double sd = 1.0;
};

/// Gaussian bump in standardized coordinates over a subset of features.
struct PlantedCluster {
  std::map<std::string, double> center;
  double width = 1.0;
};

/// Planted risk structure for one disease. The linear predictor is
///   eta = intercept + beta' z + cluster_gain * max_k bump_k(z)
/// over cohort-standardized features z. Labels are Bernoulli(sigmoid(eta));
/// event times are exponential with rate exp(eta).
struct PlantedDisease {
  std::string code;
  std::string name;
  double intercept = 0.0;
  std::map<std::string, double> beta;
  std::vector<PlantedCluster> clusters;
  double cluster_gain = 0.0;
};

struct GeneratorConfig {
  std::size_t n = 2000;
  std::uint64_t seed = 0;
  /// Residual standard deviation (latent z units) of coupled features.
  double noise_scale = 0.6;
  /// Censoring horizon as a quantile of the drawn event times.
  double horizon_quantile = 0.9;
  FeatureSchema schema = FeatureSchema::default_schema();
  std::map<std::string, FeatureProfile> profiles;
  /// coupling[target][source]: latent contribution of the source's
  /// standardized value to the target. Must form a DAG.
  std::map<std::string, std::map<std::string, double>> coupling;
  std::vector<PlantedDisease> diseases;

  /// Default schema, profiles, lifestyle-to-lab coupling and four diseases.
  static GeneratorConfig defaults();
  static GeneratorConfig from_json(const std::string& text);
  std::string to_json() const;
};

struct SyntheticCohort {
  CohortDataset dataset;
  /// Planted linear predictor eta per disease, row-aligned with dataset.
  std::map<std::string, Eigen::VectorXd> planted_scores;
  std::map<std::string, double> horizons;
};

/// Pure function of the config (seed included).
SyntheticCohort generate_planted_cohort(const GeneratorConfig& config);
CohortDataset generate_synthetic_cohort(const GeneratorConfig& config);

/// Names for the ICD-10 codes the framework ships with; unknown codes map to themselves.
std::string disease_name(const std::string& code);

}  // namespace protopal
