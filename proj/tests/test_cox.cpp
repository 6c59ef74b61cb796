#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "protopal/cox.hpp"
#include "protopal/errors.hpp"
#include "protopal/synthetic.hpp"

using namespace protopal;

namespace {

struct Survival {
  Eigen::MatrixXd x;
  Eigen::VectorXd t;
  Eigen::VectorXi e;
};

Survival simulate(std::size_t n, const Eigen::VectorXd& beta, std::uint64_t seed, double censor_rate = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto p = beta.size();
  Survival s{Eigen::MatrixXd(static_cast<Eigen::Index>(n), p), Eigen::VectorXd(static_cast<Eigen::Index>(n)),
             Eigen::VectorXi(static_cast<Eigen::Index>(n))};
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    for (Eigen::Index k = 0; k < p; ++k) s.x(i, k) = g(rng);
    s.t[i] = -std::log(u(rng)) / std::exp(s.x.row(i).dot(beta));
    s.e[i] = u(rng) > censor_rate;
  }
  return s;
}

}  // namespace

TEST_CASE("derivatives match finite differences of the partial likelihood") {
  Eigen::VectorXd beta(3);
  beta << 0.5, -0.3, 0.1;
  auto s = simulate(200, beta, 4);
  s.t = (s.t * 4).array().round();  // force tied times
  auto d = cox_derivatives(s.x, s.t, s.e, beta);
  CHECK(d.log_likelihood == doctest::Approx(cox_log_partial_likelihood(s.x, s.t, s.e, beta)).epsilon(1e-12));
  const double h = 1e-6;
  for (Eigen::Index k = 0; k < 3; ++k) {
    Eigen::VectorXd a = beta, b = beta;
    a[k] += h;
    b[k] -= h;
    double fd = (cox_log_partial_likelihood(s.x, s.t, s.e, a) - cox_log_partial_likelihood(s.x, s.t, s.e, b)) / (2 * h);
    CHECK(d.gradient[k] == doctest::Approx(fd).epsilon(1e-5));
    Eigen::VectorXd ga = cox_derivatives(s.x, s.t, s.e, a).gradient, gb = cox_derivatives(s.x, s.t, s.e, b).gradient;
    Eigen::VectorXd col = -(ga - gb) / (2 * h);
    for (Eigen::Index j = 0; j < 3; ++j) CHECK(d.information(j, k) == doctest::Approx(col[j]).epsilon(1e-4));
  }
}

TEST_CASE("one-feature fit agrees with a grid search of the naive likelihood") {
  for (std::uint64_t seed : {1, 2, 3}) {
    Eigen::VectorXd beta(1);
    beta << 0.8;
    auto s = simulate(300, beta, seed);
    auto model = fit_cox(s.x, s.t, s.e);
    std::vector<double> x(300), t(300);
    std::vector<int> e(300);
    for (int i = 0; i < 300; ++i) {
      x[static_cast<std::size_t>(i)] = s.x(i, 0);
      t[static_cast<std::size_t>(i)] = s.t[i];
      e[static_cast<std::size_t>(i)] = s.e[i];
    }
    CHECK(model.report.converged);
    CHECK(std::abs(model.beta[0] - oracle::cox_grid_argmax_1d(x, t, e)) <= 1e-3);
    double ll = oracle::cox_ll_1d(x, t, e, model.beta[0]);
    CHECK(ll == doctest::Approx(model.report.log_likelihood).epsilon(1e-10));
  }
}

TEST_CASE("planted coefficient signs are recovered and the likelihood climbs") {
  Eigen::VectorXd beta(4);
  beta << 1.0, -0.7, 0.0, 0.4;
  auto s = simulate(2000, beta, 10);
  auto model = fit_cox(s.x, s.t, s.e);
  CHECK(model.beta[0] > 0.8);
  CHECK(model.beta[1] < -0.5);
  CHECK(std::abs(model.beta[2]) < 0.15);
  CHECK(model.beta[3] > 0.2);
  const auto& h = model.report.log_likelihood_history;
  for (std::size_t k = 1; k < h.size(); ++k) CHECK(h[k] >= h[k - 1] - 1e-9 * std::abs(h[k - 1]));
}

TEST_CASE("a constant covariate stays at zero") {
  Eigen::VectorXd beta(2);
  beta << 0.5, 0.0;
  auto s = simulate(300, beta, 6);
  s.x.col(1).setZero();
  auto model = fit_cox(s.x, s.t, s.e);
  CHECK(model.report.converged);
  CHECK(model.beta[1] == 0.0);
}

TEST_CASE("perfect separation is flagged rather than fitted to infinity") {
  Eigen::MatrixXd x(20, 1);
  Eigen::VectorXd t(20);
  Eigen::VectorXi e = Eigen::VectorXi::Ones(20);
  for (int i = 0; i < 20; ++i) {
    x(i, 0) = -i;
    t[i] = i + 1;
  }
  auto model = fit_cox(x, t, e);
  CHECK(model.report.separation_flagged);
}

TEST_CASE("too few events") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 1);
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(5, 1, 5);
  Eigen::VectorXi e = Eigen::VectorXi::Zero(5);
  CHECK_THROWS(fit_cox(x, t, e));
}

TEST_CASE("baseline on a planted cohort ranks the planted feature first") {
  auto cfg = GeneratorConfig::defaults();
  cfg.n = 2000;
  cfg.diseases = {{"E11", "", -1.0, {{"glucose", 1.2}}, {}, 0.0}};
  auto ds = generate_synthetic_cohort(cfg);
  auto base = fit_cox_baseline(ds, "E11");
  Eigen::Index top = 0;
  base.model.beta.cwiseAbs().maxCoeff(&top);
  CHECK(static_cast<std::size_t>(top) == ds.schema().require_index("glucose"));
  auto sub = fit_cox_baseline(ds, "E11", {"glucose"});
  CHECK(sub.features.size() == 1);
  const auto g = static_cast<Eigen::Index>(ds.schema().require_index("glucose"));
  Eigen::VectorXd raw = Eigen::VectorXd::Constant(1, ds[0].values[g]);
  CHECK(sub.score(ds[0].values) == doctest::Approx(sub.standardizer.apply(raw)[0] * sub.model.beta[0]));
}
