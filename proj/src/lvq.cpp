#include "protopal/lvq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "protopal/synthetic.hpp"

namespace protopal {

void TrainingConfig::validate(Eigen::Index dim) const {
  if (prototypes_per_class == 0) throw TrainingError("prototypes_per_class must be positive");
  if (!(lr_prototype > 0.0) || !(lr_basis > 0.0)) throw TrainingError("learning rates must be positive");
  if (tangent_dim < 0 || tangent_dim > dim)
    throw TrainingError("tangent dimension " + std::to_string(tangent_dim) + " exceeds feature dimension " +
                        std::to_string(dim));
}

namespace {

struct Clustering {
  Eigen::MatrixXd centers;  // k x d
  std::vector<std::size_t> assignment;
};

Clustering kmeans(const Eigen::MatrixXd& pts, std::size_t k, std::size_t iterations, std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(pts.rows());
  Clustering c;
  c.centers.resize(static_cast<Eigen::Index>(k), pts.cols());
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  c.centers.row(0) = pts.row(static_cast<Eigen::Index>(pick(rng)));
  Eigen::VectorXd nearest_sq = (pts.rowwise() - c.centers.row(0)).rowwise().squaredNorm();
  for (std::size_t m = 1; m < k; ++m) {
    double total = nearest_sq.sum();
    std::size_t chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng), acc = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += nearest_sq[static_cast<Eigen::Index>(i)];
        if (acc >= target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    c.centers.row(static_cast<Eigen::Index>(m)) = pts.row(static_cast<Eigen::Index>(chosen));
    nearest_sq = nearest_sq.cwiseMin((pts.rowwise() - c.centers.row(static_cast<Eigen::Index>(m))).rowwise().squaredNorm());
  }

  c.assignment.assign(n, 0);
  auto assign = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      (c.centers.rowwise() - pts.row(static_cast<Eigen::Index>(i))).rowwise().squaredNorm().minCoeff(&best);
      c.assignment[i] = static_cast<std::size_t>(best);
    }
  };
  assign();
  for (std::size_t it = 0; it < iterations; ++it) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(c.centers.rows(), pts.cols());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(static_cast<Eigen::Index>(c.assignment[i])) += pts.row(static_cast<Eigen::Index>(i));
      ++counts[c.assignment[i]];
    }
    for (std::size_t m = 0; m < k; ++m)
      if (counts[m] > 0) c.centers.row(static_cast<Eigen::Index>(m)) = sums.row(static_cast<Eigen::Index>(m)) / static_cast<double>(counts[m]);
    auto before = c.assignment;
    assign();
    if (before == c.assignment) break;
  }
  return c;
}

Basis principal_basis(const Eigen::MatrixXd& pts, const Eigen::VectorXd& center, Eigen::Index r) {
  const Eigen::Index d = center.size();
  if (r == 0) return Basis::empty(d);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  if (pts.rows() > 0) {
    Eigen::MatrixXd centered = pts.rowwise() - center.transpose();
    cov = centered.transpose() * centered;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  // Eigenvalues ascend; take the last r columns, largest first.
  Eigen::MatrixXd v = eig.eigenvectors().rightCols(r).rowwise().reverse();
  return orthonormalize(v);
}

}  // namespace

PrototypeSet init_prototypes(const Eigen::MatrixXd& z, const std::vector<Label>& labels, const TrainingConfig& config) {
  if (static_cast<std::size_t>(z.rows()) != labels.size()) throw DimensionError("labels do not match rows");
  config.validate(z.cols());
  const Eigen::Index r = config.measure == Measure::tangent ? config.tangent_dim : 0;
  std::mt19937_64 rng(config.seed);
  std::vector<Prototype> protos;
  for (Label cls : {Label::diseased, Label::healthy}) {
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) idx.push_back(static_cast<Eigen::Index>(i));
    if (idx.empty())
      throw TrainingError("training infeasible: no " + std::string(to_string(cls)) + " individuals");
    if (idx.size() < config.prototypes_per_class)
      throw TrainingError("training infeasible: fewer " + std::string(to_string(cls)) +
                          " individuals than prototypes per class");
    Eigen::MatrixXd pts = z(idx, Eigen::all);
    auto cl = kmeans(pts, config.prototypes_per_class, config.kmeans_iterations, rng);
    for (std::size_t m = 0; m < config.prototypes_per_class; ++m) {
      std::vector<Eigen::Index> members;
      for (std::size_t i = 0; i < cl.assignment.size(); ++i)
        if (cl.assignment[i] == m) members.push_back(static_cast<Eigen::Index>(i));
      Eigen::VectorXd center = cl.centers.row(static_cast<Eigen::Index>(m)).transpose();
      Eigen::MatrixXd own = pts(members, Eigen::all);
      protos.push_back({center, cls, principal_basis(own, center, r)});
    }
  }
  Eigen::MatrixXd omega;
  if (config.measure == Measure::relevance) omega = Eigen::MatrixXd::Identity(z.cols(), z.cols());
  return PrototypeSet(config.measure, std::move(protos), std::move(omega));
}

LabelledData labelled_data(const CohortDataset& dataset, const std::string& disease, const Standardizer& standardizer) {
  LabelledData out;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto it = dataset[i].outcomes.find(disease);
    if (it == dataset[i].outcomes.end() || !it->second.label) continue;
    out.rows.push_back(i);
    out.labels.push_back(*it->second.label);
  }
  out.z.resize(static_cast<Eigen::Index>(out.rows.size()), static_cast<Eigen::Index>(dataset.schema().size()));
  for (std::size_t k = 0; k < out.rows.size(); ++k)
    out.z.row(static_cast<Eigen::Index>(k)) = standardizer.apply(dataset[out.rows[k]].values).transpose();
  return out;
}

PrototypeSet init_prototypes(const CohortDataset& dataset, const std::string& disease, const TrainingConfig& config) {
  auto data = labelled_data(dataset, disease, Standardizer::fit(dataset));
  return init_prototypes(data.z, data.labels, config);
}

Winners find_winners(const Eigen::VectorXd& x, Label label, const PrototypeSet& set) {
  if (set.size() == 0) throw Error("prototype set is empty");
  Winners w;
  bool have_plus = false, have_minus = false;
  for (std::size_t j = 0; j < set.size(); ++j) {
    double dj = set.distance(x, j);
    if (set[j].label == label) {
      if (!have_plus || dj < w.d_plus) {
        w.plus = j;
        w.d_plus = dj;
        have_plus = true;
      }
    } else if (!have_minus || dj < w.d_minus) {
      w.minus = j;
      w.d_minus = dj;
      have_minus = true;
    }
  }
  if (!have_plus || !have_minus) throw Error("prototype set must contain both classes");
  return w;
}

double glvq_mu(const Eigen::VectorXd& x, Label label, const PrototypeSet& set) {
  auto w = find_winners(x, label, set);
  double s = w.d_plus + w.d_minus;
  return s > 0.0 ? (w.d_plus - w.d_minus) / s : 0.0;
}

namespace {

// Gradient of the squared distance with respect to w (and V or Omega).
struct DistanceGradient {
  Eigen::VectorXd w;
  Eigen::MatrixXd basis;
  Eigen::MatrixXd omega;
};

DistanceGradient distance_gradient(const Eigen::VectorXd& x, const PrototypeSet& set, std::size_t j) {
  const auto& p = set[j];
  DistanceGradient g;
  Eigen::VectorXd r = x - p.w;
  switch (set.measure()) {
    case Measure::euclidean: g.w = -2.0 * r; break;
    case Measure::relevance: {
      Eigen::VectorXd proj = set.omega() * r;
      g.w = -2.0 * set.omega().transpose() * proj;
      g.omega = 2.0 * proj * r.transpose();
      break;
    }
    case Measure::tangent: {
      // d = ||(I - V V') r||^2, differentiated without assuming V'V = I.
      const auto& v = p.basis.matrix();
      if (v.cols() == 0) {
        g.w = -2.0 * r;
        g.basis = Eigen::MatrixXd(v.rows(), 0);
        break;
      }
      Eigen::VectorXd vr = v.transpose() * r;
      Eigen::VectorXd res = r - v * vr;
      Eigen::VectorXd vres = v.transpose() * res;
      g.w = -2.0 * (res - v * vres);
      g.basis = -2.0 * (res * vr.transpose() + r * vres.transpose());
      break;
    }
  }
  return g;
}

}  // namespace

MuGradient glvq_mu_gradient(const Eigen::VectorXd& x, Label label, const PrototypeSet& set) {
  MuGradient out;
  out.winners = find_winners(x, label, set);
  const double dp = out.winners.d_plus, dm = out.winners.d_minus, s = dp + dm;
  const Eigen::Index d = set.dimension();
  auto gp = distance_gradient(x, set, out.winners.plus);
  auto gm = distance_gradient(x, set, out.winners.minus);
  double dmu_dp = 0.0, dmu_dm = 0.0;
  if (s > 0.0) {
    out.mu = (dp - dm) / s;
    dmu_dp = 2.0 * dm / (s * s);
    dmu_dm = -2.0 * dp / (s * s);
  }
  out.w_plus = dmu_dp * gp.w;
  out.w_minus = dmu_dm * gm.w;
  if (set.measure() == Measure::tangent) {
    out.basis_plus = dmu_dp * gp.basis;
    out.basis_minus = dmu_dm * gm.basis;
  }
  if (set.measure() == Measure::relevance)
    out.omega = dmu_dp * gp.omega + dmu_dm * gm.omega;
  else
    out.omega = Eigen::MatrixXd(d, 0);
  return out;
}

Label classify(const Eigen::VectorXd& x, const PrototypeSet& set) { return set[nearest_prototype(x, set)].label; }

double mean_cost(const Eigen::MatrixXd& z, const std::vector<Label>& labels, const PrototypeSet& set) {
  if (labels.empty()) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) total += glvq_mu(z.row(i).transpose(), labels[static_cast<std::size_t>(i)], set);
  return total / static_cast<double>(labels.size());
}

TrainingResult train_prototypes(const Eigen::MatrixXd& z, const std::vector<Label>& labels,
                                const TrainingConfig& config) {
  return train_prototypes(z, labels, config, init_prototypes(z, labels, config));
}

TrainingResult train_prototypes(const Eigen::MatrixXd& z, const std::vector<Label>& labels,
                                const TrainingConfig& config, PrototypeSet set) {
  if (static_cast<std::size_t>(z.rows()) != labels.size()) throw DimensionError("labels do not match rows");
  config.validate(z.cols());
  if (!set.has_both_classes()) throw TrainingError("training infeasible: prototype set lacks a class");

  TrainingResult result;
  double cost = mean_cost(z, labels, set);
  result.cost_history.push_back(cost);

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  double lr_w = config.lr_prototype, lr_v = config.lr_basis;
  const double dim = static_cast<double>(z.cols());

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    PrototypeSet snapshot = set;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t sample : order) {
      Eigen::VectorXd x = z.row(static_cast<Eigen::Index>(sample)).transpose();
      auto g = glvq_mu_gradient(x, labels[sample], set);
      bool finite = std::isfinite(g.mu) && g.w_plus.allFinite() && g.w_minus.allFinite() &&
                    g.basis_plus.allFinite() && g.basis_minus.allFinite() && g.omega.allFinite();
      if (!finite)
        throw TrainingError("non-finite gradient at epoch " + std::to_string(epoch) + ", sample " +
                            std::to_string(sample));
      auto& plus = set.mutable_prototype(g.winners.plus);
      auto& minus = set.mutable_prototype(g.winners.minus);
      plus.w -= lr_w * g.w_plus;
      minus.w -= lr_w * g.w_minus;
      if (set.measure() == Measure::tangent && plus.basis.rank() > 0) {
        try {
          plus.basis = orthonormalize(plus.basis.matrix() - lr_v * g.basis_plus);
          minus.basis = orthonormalize(minus.basis.matrix() - lr_v * g.basis_minus);
        } catch (const DegenerateBasisError& e) {
          throw TrainingError("degenerate tangent basis at epoch " + std::to_string(epoch) + ", sample " +
                              std::to_string(sample) + ": " + e.what());
        }
      }
      if (set.measure() == Measure::relevance) set.mutable_omega() -= lr_v * g.omega;
    }
    if (set.measure() == Measure::relevance) {
      double tr = set.omega().squaredNorm();  // trace(Omega' Omega)
      if (!(tr > 0.0) || !std::isfinite(tr)) throw TrainingError("relevance matrix collapsed at epoch " + std::to_string(epoch));
      set.mutable_omega() *= std::sqrt(dim / tr);
    }
    double next = mean_cost(z, labels, set);
    if (!std::isfinite(next)) throw TrainingError("non-finite cost at epoch " + std::to_string(epoch));
    if (next > cost) {
      set = std::move(snapshot);
      lr_w *= 0.5;
      lr_v *= 0.5;
    } else {
      cost = next;
    }
    result.cost_history.push_back(cost);
  }
  result.prototypes = std::move(set);
  return result;
}

TrainedDiseaseModel train(const CohortDataset& dataset, const std::string& disease, const TrainingConfig& config) {
  if (dataset.empty()) throw TrainingError("cannot train on an empty dataset");
  TrainedDiseaseModel model;
  model.disease = disease;
  model.name = disease_name(disease);
  model.schema = dataset.schema();
  model.schema_hash = dataset.schema().hash();
  model.standardizer = Standardizer::fit(dataset);
  auto data = labelled_data(dataset, disease, model.standardizer);
  auto result = train_prototypes(data.z, data.labels, config);
  model.prototypes = std::move(result.prototypes);
  model.metadata.config = config;
  model.metadata.cost_history = std::move(result.cost_history);
  model.metadata.final_cost = model.metadata.cost_history.back();
  model.metadata.n_train = data.rows.size();
  return model;
}

}  // namespace protopal
