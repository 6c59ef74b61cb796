#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "protopal/schema.hpp"
#include "protopal/standardizer.hpp"

namespace protopal {

struct CoxOptions {
  std::size_t max_iterations = 100;
  double tolerance = 1e-6;         // on the gradient 2-norm
  double separation_bound = 50.0;  // ||beta|| beyond this flags separation
  std::size_t max_halvings = 40;
};

struct CoxReport {
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  double log_likelihood = 0.0;
  bool converged = false;
  bool separation_flagged = false;
  std::vector<double> log_likelihood_history;  // accepted iterates
};

struct CoxModel {
  Eigen::VectorXd beta;
  CoxReport report;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const { return x * beta; }
};

/// Breslow log partial likelihood with its gradient and observed information.
struct CoxDerivatives {
  double log_likelihood = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd information;
};

CoxDerivatives cox_derivatives(const Eigen::MatrixXd& x, const Eigen::VectorXd& time, const Eigen::VectorXi& event,
                               const Eigen::VectorXd& beta);
double cox_log_partial_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& time,
                                  const Eigen::VectorXi& event, const Eigen::VectorXd& beta);

/// Newton-Raphson from beta = 0 with step halving on likelihood decrease.
/// Throws ConvergenceError (with the final gradient norm) when the iteration
/// budget runs out without separation being flagged.
CoxModel fit_cox(const Eigen::MatrixXd& x, const Eigen::VectorXd& time, const Eigen::VectorXi& event,
                 const CoxOptions& options = {});

/// Cox model on standardized raw features of a cohort for one disease.
struct CoxBaseline {
  std::string disease;
  std::vector<std::size_t> features;
  Standardizer standardizer;
  CoxModel model;

  /// Linear predictor beta' z for an individual's raw feature vector.
  double score(const Eigen::VectorXd& raw_values) const;
};

/// Uses individuals carrying event_time/censored for `disease`. An empty
/// feature list selects every schema feature.
CoxBaseline fit_cox_baseline(const CohortDataset& train, const std::string& disease,
                             const std::vector<std::string>& features = {}, const CoxOptions& options = {});

}  // namespace protopal
