#include "protopal/prototypes.hpp"

#include <limits>

namespace protopal {

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::euclidean: return "euclidean";
    case Measure::relevance: return "relevance";
    case Measure::tangent: return "tangent";
  }
  return "?";
}

Measure parse_measure(std::string_view s) {
  for (auto m : {Measure::euclidean, Measure::relevance, Measure::tangent})
    if (to_string(m) == s) return m;
  throw Error("unknown distance measure '" + std::string(s) + "'");
}

PrototypeSet::PrototypeSet(Measure measure, std::vector<Prototype> prototypes, Eigen::MatrixXd omega)
    : measure_(measure), prototypes_(std::move(prototypes)), omega_(std::move(omega)) {
  if (prototypes_.empty()) throw Error("prototype set is empty");
  const Eigen::Index d = prototypes_.front().w.size();
  for (auto& p : prototypes_) {
    detail::require_same_size(p.w.size(), d, "prototype");
    if (p.basis.dimension() == 0 && p.basis.rank() == 0) p.basis = Basis::empty(d);
    detail::require_same_size(p.basis.dimension(), d, "prototype basis");
  }
  if (measure_ == Measure::relevance) {
    if (omega_.size() == 0) omega_ = Eigen::MatrixXd::Identity(d, d);
    detail::require_same_size(omega_.cols(), d, "relevance matrix");
    if (!omega_.allFinite()) throw Error("relevance matrix has non-finite entries");
  }
}

bool PrototypeSet::has_both_classes() const {
  bool diseased = false, healthy = false;
  for (const auto& p : prototypes_) (p.label == Label::diseased ? diseased : healthy) = true;
  return diseased && healthy;
}

double PrototypeSet::distance(const Eigen::VectorXd& x, std::size_t j) const {
  const auto& p = prototypes_[j];
  switch (measure_) {
    case Measure::euclidean: return euclidean_sq(x, p.w);
    case Measure::relevance: return relevance_dist_sq(x, p.w, omega_);
    case Measure::tangent: return tangent_dist_sq(x, p.w, p.basis);
  }
  return 0.0;
}

Eigen::VectorXd PrototypeSet::distances(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
  for (std::size_t j = 0; j < size(); ++j) out[static_cast<Eigen::Index>(j)] = distance(x, j);
  return out;
}

std::size_t nearest_prototype(const Eigen::VectorXd& x, const PrototypeSet& set) {
  if (set.size() == 0) throw Error("prototype set is empty");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < set.size(); ++j) {
    double dj = set.distance(x, j);
    if (dj < best_d) {
      best_d = dj;
      best = j;
    }
  }
  return best;
}

std::size_t nearest_of_class(const Eigen::VectorXd& x, const PrototypeSet& set, Label label) {
  std::size_t best = set.size();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (set[j].label != label) continue;
    double dj = set.distance(x, j);
    if (best == set.size() || dj < best_d) {
      best_d = dj;
      best = j;
    }
  }
  if (best == set.size()) throw Error("prototype set has no " + std::string(to_string(label)) + " prototype");
  return best;
}

}  // namespace protopal
