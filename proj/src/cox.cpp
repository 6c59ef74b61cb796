#include "protopal/cox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace protopal {

namespace {

std::vector<Eigen::Index> descending_time_order(const Eigen::VectorXd& time) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(time.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return time[a] > time[b]; });
  return order;
}

void check_inputs(const Eigen::MatrixXd& x, const Eigen::VectorXd& time, const Eigen::VectorXi& event,
                  const Eigen::VectorXd& beta) {
  if (x.rows() != time.size() || x.rows() != event.size()) throw DimensionError("cox: row counts differ");
  if (beta.size() != x.cols()) throw DimensionError("cox: coefficient length differs from feature count");
}

}  // namespace

CoxDerivatives cox_derivatives(const Eigen::MatrixXd& x, const Eigen::VectorXd& time, const Eigen::VectorXi& event,
                               const Eigen::VectorXd& beta) {
  check_inputs(x, time, event, beta);
  const Eigen::Index p = x.cols();
  Eigen::VectorXd eta = x * beta;
  const double shift = eta.size() > 0 ? eta.maxCoeff() : 0.0;
  Eigen::VectorXd w = (eta.array() - shift).exp();

  CoxDerivatives out;
  out.gradient = Eigen::VectorXd::Zero(p);
  out.information = Eigen::MatrixXd::Zero(p, p);
  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);

  auto order = descending_time_order(time);
  const auto n = order.size();
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    const double t = time[order[i]];
    while (j < n && time[order[j]] == t) {
      const Eigen::Index k = order[j];
      s0 += w[k];
      s1.noalias() += w[k] * x.row(k).transpose();
      s2.noalias() += w[k] * x.row(k).transpose() * x.row(k);
      ++j;
    }
    for (std::size_t m = i; m < j; ++m) {
      const Eigen::Index k = order[m];
      if (event[k] == 0) continue;
      Eigen::VectorXd mean = s1 / s0;
      out.log_likelihood += eta[k] - (std::log(s0) + shift);
      out.gradient += x.row(k).transpose() - mean;
      out.information += s2 / s0 - mean * mean.transpose();
    }
    i = j;
  }
  return out;
}

double cox_log_partial_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& time,
                                  const Eigen::VectorXi& event, const Eigen::VectorXd& beta) {
  check_inputs(x, time, event, beta);
  Eigen::VectorXd eta = x * beta;
  const double shift = eta.size() > 0 ? eta.maxCoeff() : 0.0;
  auto order = descending_time_order(time);
  const auto n = order.size();
  double ll = 0.0, s0 = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    const double t = time[order[i]];
    while (j < n && time[order[j]] == t) s0 += std::exp(eta[order[j++]] - shift);
    for (std::size_t m = i; m < j; ++m)
      if (event[order[m]] != 0) ll += eta[order[m]] - (std::log(s0) + shift);
    i = j;
  }
  return ll;
}

CoxModel fit_cox(const Eigen::MatrixXd& x, const Eigen::VectorXd& time, const Eigen::VectorXi& event,
                 const CoxOptions& options) {
  if (x.rows() != time.size() || x.rows() != event.size()) throw DimensionError("cox: row counts differ");
  if ((event.array() != 0).count() < 2) throw Error("cox: need at least two uncensored events");

  CoxModel model;
  model.beta = Eigen::VectorXd::Zero(x.cols());
  auto& rep = model.report;
  auto cur = cox_derivatives(x, time, event, model.beta);
  rep.log_likelihood_history.push_back(cur.log_likelihood);

  for (rep.iterations = 0; rep.iterations < options.max_iterations; ++rep.iterations) {
    rep.gradient_norm = cur.gradient.norm();
    if (rep.gradient_norm <= options.tolerance) {
      rep.converged = true;
      break;
    }
    Eigen::VectorXd step = cur.information.completeOrthogonalDecomposition().solve(cur.gradient);
    Eigen::VectorXd next = model.beta + step;
    double ll = cox_log_partial_likelihood(x, time, event, next);
    // Summation noise in the likelihood grows with |ll|; near the optimum it
    // dwarfs the true increase of a Newton step.
    const double floor = cur.log_likelihood - 1e-13 * std::max(1.0, std::abs(cur.log_likelihood));
    std::size_t halvings = 0;
    while (!(ll >= floor) && halvings < options.max_halvings) {
      step *= 0.5;
      next = model.beta + step;
      ll = cox_log_partial_likelihood(x, time, event, next);
      ++halvings;
    }
    if (!(ll >= floor)) break;
    model.beta = next;
    cur = cox_derivatives(x, time, event, model.beta);
    rep.log_likelihood_history.push_back(cur.log_likelihood);
    if (model.beta.norm() > options.separation_bound) {
      rep.separation_flagged = true;
      break;
    }
  }
  rep.gradient_norm = cur.gradient.norm();
  rep.log_likelihood = cur.log_likelihood;
  if (!rep.separation_flagged && x.cols() > 0) {
    // Monotone likelihood: curvature vanishes along a direction in which beta has run off.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cur.information);
    const double events = static_cast<double>((event.array() != 0).count());
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k)
      if (eig.eigenvalues()[k] <= 1e-6 * events && std::abs(eig.eigenvectors().col(k).dot(model.beta)) > 5.0)
        rep.separation_flagged = true;
  }
  if (!rep.converged && rep.gradient_norm <= options.tolerance) rep.converged = true;
  if (!rep.converged && !rep.separation_flagged)
    throw ConvergenceError("cox: no convergence after " + std::to_string(rep.iterations) +
                           " iterations, gradient norm " + std::to_string(rep.gradient_norm));
  return model;
}

double CoxBaseline::score(const Eigen::VectorXd& raw_values) const {
  Eigen::VectorXd sub(static_cast<Eigen::Index>(features.size()));
  for (std::size_t k = 0; k < features.size(); ++k) sub[static_cast<Eigen::Index>(k)] = raw_values[static_cast<Eigen::Index>(features[k])];
  return standardizer.apply(sub).dot(model.beta);
}

CoxBaseline fit_cox_baseline(const CohortDataset& train, const std::string& disease,
                             const std::vector<std::string>& features, const CoxOptions& options) {
  CoxBaseline out;
  out.disease = disease;
  if (features.empty()) {
    out.features.resize(train.schema().size());
    std::iota(out.features.begin(), out.features.end(), std::size_t{0});
  } else {
    for (const auto& f : features) out.features.push_back(train.schema().require_index(f));
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto it = train[i].outcomes.find(disease);
    if (it != train[i].outcomes.end() && it->second.event_time) rows.push_back(i);
  }
  if (rows.empty()) throw Error("cox: no individuals with event times for " + disease);
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(out.features.size());
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd time(n);
  Eigen::VectorXi event(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& ind = train[rows[static_cast<std::size_t>(r)]];
    for (Eigen::Index c = 0; c < p; ++c) x(r, c) = ind.values[static_cast<Eigen::Index>(out.features[static_cast<std::size_t>(c)])];
    const auto& o = ind.outcomes.at(disease);
    time[r] = *o.event_time;
    event[r] = *o.censored ? 0 : 1;
  }
  out.standardizer = Standardizer::fit(x);
  out.model = fit_cox(out.standardizer.apply_rows(x), time, event, options);
  return out;
}

}  // namespace protopal
