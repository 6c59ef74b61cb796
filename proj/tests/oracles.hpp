#pragma once

// Deliberately naive reference implementations. None of these call into the
// library's own distance, risk or metric code.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace oracle {

struct Proto {
  Eigen::VectorXd w;
  bool diseased = false;
  Eigen::MatrixXd basis;  // d x r, may have zero columns
};

inline double sq_norm_loop(const Eigen::VectorXd& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += v[i] * v[i];
  return s;
}

/// min over a of ||x - w - V a||^2 via the normal equations.
inline double affine_dist_sq(const Eigen::VectorXd& x, const Eigen::VectorXd& w, const Eigen::MatrixXd& v) {
  Eigen::VectorXd diff = x - w;
  if (v.cols() == 0) return sq_norm_loop(diff);
  Eigen::VectorXd a = (v.transpose() * v).ldlt().solve(v.transpose() * diff);
  return sq_norm_loop(diff - v * a);
}

/// Coarse-to-fine grid search over the coefficients of a rank <= 3 basis.
inline double grid_affine_dist_sq(const Eigen::VectorXd& x, const Eigen::VectorXd& w, const Eigen::MatrixXd& v,
                                  double half_width = 20.0, int rounds = 60, int steps = 21) {
  const int r = static_cast<int>(v.cols());
  Eigen::VectorXd center = Eigen::VectorXd::Zero(r);
  double best = sq_norm_loop(x - w);
  if (r == 0) return best;
  double h = half_width;
  for (int round = 0; round < rounds; ++round) {
    Eigen::VectorXd best_a = center;
    std::vector<int> idx(static_cast<std::size_t>(r), 0);
    while (true) {
      Eigen::VectorXd a(r);
      for (int k = 0; k < r; ++k) a[k] = center[k] + h * (2.0 * idx[static_cast<std::size_t>(k)] / (steps - 1) - 1.0);
      double dist = sq_norm_loop(x - w - v * a);
      if (dist < best) {
        best = dist;
        best_a = a;
      }
      int k = 0;
      while (k < r && ++idx[static_cast<std::size_t>(k)] == steps) idx[static_cast<std::size_t>(k++)] = 0;
      if (k == r) break;
    }
    center = best_a;
    h *= 0.5;
  }
  return best;
}

/// Smallest ball holding both classes, then inverse-distance diseased share.
inline double risk(const std::vector<double>& dist, const std::vector<bool>& diseased) {
  double min_d = std::numeric_limits<double>::infinity(), min_h = min_d;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    double& slot = diseased[j] ? min_d : min_h;
    slot = std::min(slot, dist[j]);
  }
  const double radius = std::max(min_d, min_h);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    if (dist[j] > radius) continue;
    double inv = 1.0 / std::max(dist[j], 1e-12);
    den += inv;
    if (diseased[j]) num += inv;
  }
  return num / den;
}

inline double risk(const Eigen::VectorXd& x, const std::vector<Proto>& protos) {
  std::vector<double> dist;
  std::vector<bool> labels;
  for (const auto& p : protos) {
    dist.push_back(affine_dist_sq(x, p.w, p.basis));
    labels.push_back(p.diseased);
  }
  return risk(dist, labels);
}

inline double auc_pairs(const Eigen::VectorXd& s, const Eigen::VectorXi& y) {
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      den += 1.0;
      num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  return num / den;
}

inline double c_index_pairs(const Eigen::VectorXd& s, const Eigen::VectorXd& t, const Eigen::VectorXi& censored) {
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (censored[i] != 0) continue;
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      if (!(t[i] < t[j])) continue;
      den += 1.0;
      num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return num / den;
}

/// Breslow log partial likelihood of a single covariate, O(n^2).
inline double cox_ll_1d(const std::vector<double>& x, const std::vector<double>& t, const std::vector<int>& event,
                        double beta) {
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!event[i]) continue;
    double risk_set = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (t[j] >= t[i]) risk_set += std::exp(beta * x[j]);
    ll += beta * x[i] - std::log(risk_set);
  }
  return ll;
}

inline double cox_grid_argmax_1d(const std::vector<double>& x, const std::vector<double>& t,
                                 const std::vector<int>& event, double lo = -5.0, double hi = 5.0) {
  double best_b = 0.0;
  for (int round = 0; round < 12; ++round) {
    double best = -std::numeric_limits<double>::infinity();
    const int steps = 41;
    for (int k = 0; k < steps; ++k) {
      double b = lo + (hi - lo) * k / (steps - 1);
      double ll = cox_ll_1d(x, t, event, b);
      if (ll > best) {
        best = ll;
        best_b = b;
      }
    }
    double span = (hi - lo) / (steps - 1);
    lo = best_b - span;
    hi = best_b + span;
  }
  return best_b;
}

}  // namespace oracle
