#pragma once

#include <Eigen/Core>

namespace protopal {

/// Mann-Whitney AUC of `scores` against binary `labels` (1 = positive);
/// tied score pairs count one half. Throws MetricError for single-class labels.
double auc(const Eigen::VectorXd& scores, const Eigen::VectorXi& labels);

/// Harrell's concordance: over pairs where subject i has an observed event
/// strictly before subject j's time, the fraction with score_i > score_j
/// (ties one half). `censored[i] != 0` marks censoring. O(n log n).
double c_index(const Eigen::VectorXd& scores, const Eigen::VectorXd& event_times, const Eigen::VectorXi& censored);

}  // namespace protopal
