#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "protopal/model.hpp"

namespace protopal {

/// k-means++ seeding plus Lloyd refinement per class on standardized rows;
/// tangent bases are the top principal directions of each seed's points.
PrototypeSet init_prototypes(const Eigen::MatrixXd& z, const std::vector<Label>& labels, const TrainingConfig& config);
PrototypeSet init_prototypes(const CohortDataset& dataset, const std::string& disease, const TrainingConfig& config);

struct Winners {
  std::size_t plus = 0;   // closest prototype of the queried class
  std::size_t minus = 0;  // closest prototype of the other class
  double d_plus = 0.0;
  double d_minus = 0.0;
};

Winners find_winners(const Eigen::VectorXd& x, Label label, const PrototypeSet& set);

/// Relative distance (d+ - d-) / (d+ + d-); 0 when both distances vanish.
double glvq_mu(const Eigen::VectorXd& x, Label label, const PrototypeSet& set);

/// Analytic gradient of mu with respect to the two winners' parameters.
struct MuGradient {
  double mu = 0.0;
  Winners winners;
  Eigen::VectorXd w_plus, w_minus;
  Eigen::MatrixXd basis_plus, basis_minus;  // tangent measure only
  Eigen::MatrixXd omega;                    // relevance measure only
};

MuGradient glvq_mu_gradient(const Eigen::VectorXd& x, Label label, const PrototypeSet& set);

/// Label of the globally nearest prototype, lowest index on ties.
Label classify(const Eigen::VectorXd& x, const PrototypeSet& set);

double mean_cost(const Eigen::MatrixXd& z, const std::vector<Label>& labels, const PrototypeSet& set);

struct TrainingResult {
  PrototypeSet prototypes;
  std::vector<double> cost_history;
};

/// Per-sample winner-takes-all descent on the summed mu. An epoch whose mean
/// cost rises is rolled back and both learning rates are halved, so the
/// recorded history is non-increasing.
TrainingResult train_prototypes(const Eigen::MatrixXd& z, const std::vector<Label>& labels,
                                const TrainingConfig& config);
TrainingResult train_prototypes(const Eigen::MatrixXd& z, const std::vector<Label>& labels,
                                const TrainingConfig& config, PrototypeSet initial);

/// Standardized design matrix and labels of the individuals labelled for `disease`.
struct LabelledData {
  Eigen::MatrixXd z;
  std::vector<Label> labels;
  std::vector<std::size_t> rows;
};
LabelledData labelled_data(const CohortDataset& dataset, const std::string& disease, const Standardizer& standardizer);

/// Fits the standardizer and prototypes for one disease; autoencoders stay unfitted.
TrainedDiseaseModel train(const CohortDataset& dataset, const std::string& disease, const TrainingConfig& config);

}  // namespace protopal
