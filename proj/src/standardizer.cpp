#include "protopal/standardizer.hpp"

#include <cmath>

namespace protopal {

Standardizer::Standardizer(Eigen::VectorXd mean, Eigen::VectorXd scale)
    : mean_(std::move(mean)), scale_(std::move(scale)) {
  if (mean_.size() != scale_.size()) throw DimensionError("standardizer mean/scale size mismatch");
  for (Eigen::Index i = 0; i < scale_.size(); ++i)
    if (!(scale_[i] > 0.0) || !std::isfinite(scale_[i]) || !std::isfinite(mean_[i]))
      throw Error("standardizer scale must be positive and finite");
}

Standardizer Standardizer::identity(Eigen::Index dim) {
  return Standardizer(Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim));
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) throw Error("cannot fit a standardizer on an empty dataset");
  Eigen::VectorXd mean = rows.colwise().mean().transpose();
  Eigen::VectorXd scale(rows.cols());
  for (Eigen::Index c = 0; c < rows.cols(); ++c) {
    double var = (rows.col(c).array() - mean[c]).square().mean();
    double sd = std::sqrt(var);
    scale[c] = sd < kScaleFloor ? 1.0 : sd;
  }
  return Standardizer(std::move(mean), std::move(scale));
}

Standardizer Standardizer::fit(const CohortDataset& dataset) { return fit(dataset.matrix()); }

Eigen::MatrixXd Standardizer::apply_rows(const Eigen::MatrixXd& rows) const {
  check(rows.cols());
  return ((rows.rowwise() - mean_.transpose()).array().rowwise() / scale_.transpose().array()).matrix();
}

void Standardizer::check(Eigen::Index n) const {
  if (n != mean_.size())
    throw DimensionError("standardizer expects dimension " + std::to_string(mean_.size()) + ", got " +
                         std::to_string(n));
}

}  // namespace protopal
