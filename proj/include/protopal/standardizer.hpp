#pragma once

#include <Eigen/Core>

#include "protopal/schema.hpp"

namespace protopal {

/// Per-feature affine map z = (x - mean) / scale. Every feature column is
/// standardized, ordinal and binary levels included, so prototypes live in a
/// single distance space.
class Standardizer {
 public:
  static constexpr double kScaleFloor = 1e-8;

  Standardizer() = default;
  Standardizer(Eigen::VectorXd mean, Eigen::VectorXd scale);

  /// Identity map of the given dimension.
  static Standardizer identity(Eigen::Index dim);
  /// Population mean and standard deviation per column; columns whose
  /// deviation falls below the floor get scale 1.
  static Standardizer fit(const Eigen::MatrixXd& rows);
  static Standardizer fit(const CohortDataset& dataset);

  Eigen::Index dimension() const { return mean_.size(); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& scale() const { return scale_; }

  template <typename Derived>
  Eigen::VectorXd apply(const Eigen::MatrixBase<Derived>& x) const {
    check(x.size());
    return ((x.derived().template cast<double>() - mean_).array() / scale_.array()).matrix();
  }

  template <typename Derived>
  Eigen::VectorXd invert(const Eigen::MatrixBase<Derived>& z) const {
    check(z.size());
    return (z.derived().template cast<double>().array() * scale_.array()).matrix() + mean_;
  }

  /// Row-wise apply over an n x d matrix.
  Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& rows) const;

  bool operator==(const Standardizer& o) const { return mean_ == o.mean_ && scale_ == o.scale_; }

 private:
  void check(Eigen::Index n) const;

  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;
};

}  // namespace protopal
