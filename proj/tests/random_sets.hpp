#pragma once

#include <random>

#include "oracles.hpp"
#include "protopal/distance.hpp"
#include "protopal/prototypes.hpp"

namespace testdata {

inline Eigen::VectorXd randn(std::mt19937_64& rng, Eigen::Index n, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  Eigen::VectorXd v(n);
  for (auto& e : v) e = g(rng);
  return v;
}

/// Random prototype set with both classes, plus the oracle's view of it.
struct RandomSet {
  protopal::PrototypeSet set;
  std::vector<oracle::Proto> view;
  Eigen::MatrixXd omega;
};

inline RandomSet random_set(std::mt19937_64& rng, Eigen::Index d, std::size_t n, protopal::Measure m) {
  using namespace protopal;
  std::uniform_int_distribution<Eigen::Index> rank(0, d - 1);
  RandomSet out;
  std::vector<Prototype> protos;
  for (std::size_t j = 0; j < n; ++j) {
    Label label = j == 0 ? Label::diseased : j == 1 ? Label::healthy : (rng() % 2 ? Label::diseased : Label::healthy);
    Basis basis = Basis::empty(d);
    if (m == Measure::tangent) {
      Eigen::Index r = rank(rng);
      Eigen::MatrixXd raw(d, r);
      for (Eigen::Index c = 0; c < r; ++c) raw.col(c) = randn(rng, d);
      basis = orthonormalize(raw);
    }
    protos.push_back({randn(rng, d, 2.0), label, basis});
    out.view.push_back({protos.back().w, label == Label::diseased, basis.matrix()});
  }
  if (m == Measure::relevance) {
    out.omega = Eigen::MatrixXd::Identity(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index k = 0; k < d; ++k) out.omega(i, k) += 0.4 * randn(rng, 1)[0];
  }
  out.set = PrototypeSet(m, std::move(protos), out.omega);
  return out;
}

/// Oracle distances: least-squares affine projection or explicit Omega loop.
inline std::vector<double> oracle_distances(const RandomSet& rs, const Eigen::VectorXd& x) {
  std::vector<double> dist;
  for (const auto& p : rs.view) {
    if (rs.omega.size() > 0) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < rs.omega.rows(); ++i) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < x.size(); ++k) acc += rs.omega(i, k) * (x[k] - p.w[k]);
        s += acc * acc;
      }
      dist.push_back(s);
    } else {
      dist.push_back(oracle::affine_dist_sq(x, p.w, p.basis));
    }
  }
  return dist;
}

inline std::vector<bool> oracle_labels(const RandomSet& rs) {
  std::vector<bool> out;
  for (const auto& p : rs.view) out.push_back(p.diseased);
  return out;
}

}  // namespace testdata
