#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "protopal/distance.hpp"
#include "protopal/schema.hpp"

namespace protopal {

enum class Measure { euclidean, relevance, tangent };

std::string_view to_string(Measure m);
Measure parse_measure(std::string_view s);

struct Prototype {
  Eigen::VectorXd w;  // standardized feature space
  Label label = Label::healthy;
  Basis basis;        // rank 0 unless the measure is tangent
};

/// The labeled prototype set W together with its distance measure. The
/// relevance matrix is only consulted for Measure::relevance.
class PrototypeSet {
 public:
  PrototypeSet() = default;
  PrototypeSet(Measure measure, std::vector<Prototype> prototypes, Eigen::MatrixXd omega = {});

  Measure measure() const { return measure_; }
  std::size_t size() const { return prototypes_.size(); }
  Eigen::Index dimension() const { return prototypes_.empty() ? 0 : prototypes_.front().w.size(); }
  const Prototype& operator[](std::size_t j) const { return prototypes_[j]; }
  const std::vector<Prototype>& prototypes() const { return prototypes_; }
  const Eigen::MatrixXd& omega() const { return omega_; }
  bool has_both_classes() const;

  /// Squared distance m(x, P_j) under the configured measure.
  double distance(const Eigen::VectorXd& x, std::size_t j) const;
  Eigen::VectorXd distances(const Eigen::VectorXd& x) const;

  // Mutable access for the trainer; callers must keep invariants intact.
  Prototype& mutable_prototype(std::size_t j) { return prototypes_[j]; }
  Eigen::MatrixXd& mutable_omega() { return omega_; }

 private:
  Measure measure_ = Measure::euclidean;
  std::vector<Prototype> prototypes_;
  Eigen::MatrixXd omega_;
};

/// Index of the nearest prototype (lowest index on ties).
std::size_t nearest_prototype(const Eigen::VectorXd& x, const PrototypeSet& set);
/// Nearest prototype carrying `label` (lowest index on ties).
std::size_t nearest_of_class(const Eigen::VectorXd& x, const PrototypeSet& set, Label label);

}  // namespace protopal
