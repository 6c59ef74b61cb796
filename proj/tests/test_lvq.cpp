#include <doctest.h>

#include <random>

#include "blobs.hpp"
#include "oracles.hpp"
#include "protopal/distance.hpp"
#include "protopal/errors.hpp"
#include "protopal/lvq.hpp"
#include "protopal/metrics.hpp"
#include "protopal/risk.hpp"

using namespace protopal;

namespace {

Eigen::VectorXd randn(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (auto& e : v) e = g(rng);
  return v;
}

// mu with winners fixed, tangent distance computed from raw (possibly
// non-orthonormal) bases.
double mu_direct(const Eigen::VectorXd& x, const Eigen::VectorXd& wp, const Eigen::MatrixXd& vp,
                 const Eigen::VectorXd& wm, const Eigen::MatrixXd& vm) {
  auto dist = [&](const Eigen::VectorXd& w, const Eigen::MatrixXd& v) {
    Eigen::VectorXd r = x - w;
    Eigen::VectorXd res = r - v * (v.transpose() * r);
    return oracle::sq_norm_loop(res);
  };
  double dp = dist(wp, vp), dm = dist(wm, vm);
  return (dp - dm) / (dp + dm);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1e-8, std::abs(a), std::abs(b)}); }

}  // namespace

TEST_CASE("mu is negative when correct, positive when wrong, bounded") {
  std::vector<Prototype> p{{Eigen::Vector2d(0, 0), Label::healthy, Basis::empty(2)},
                           {Eigen::Vector2d(4, 0), Label::diseased, Basis::empty(2)}};
  PrototypeSet set(Measure::euclidean, p);
  Eigen::VectorXd x = Eigen::Vector2d(1, 0);
  CHECK(glvq_mu(x, Label::healthy, set) == doctest::Approx((1.0 - 9.0) / 10.0));
  CHECK(glvq_mu(x, Label::diseased, set) == doctest::Approx(0.8));
  CHECK(glvq_mu(Eigen::VectorXd(Eigen::Vector2d(2, 0)), Label::healthy, set) == 0.0);
  CHECK(glvq_mu(Eigen::VectorXd(Eigen::Vector2d(0, 0)), Label::healthy, set) == -1.0);
}

TEST_CASE("tangent gradients match central differences") {
  std::mt19937_64 rng(42);
  const double h = 1e-5;
  for (int cfg = 0; cfg < 20; ++cfg) {
    const Eigen::Index d = 2 + cfg % 5, r = 1 + cfg % (d - 1);
    Eigen::MatrixXd raw_p(d, r), raw_m(d, r);
    for (Eigen::Index c = 0; c < r; ++c) {
      raw_p.col(c) = randn(rng, d);
      raw_m.col(c) = randn(rng, d);
    }
    std::vector<Prototype> protos{{randn(rng, d), Label::diseased, orthonormalize(raw_p)},
                                  {randn(rng, d), Label::healthy, orthonormalize(raw_m)}};
    PrototypeSet set(Measure::tangent, protos);
    Eigen::VectorXd x = randn(rng, d) * 2.0;
    auto g = glvq_mu_gradient(x, Label::diseased, set);
    REQUIRE(g.winners.plus == 0);

    Eigen::VectorXd wp = set[0].w, wm = set[1].w;
    Eigen::MatrixXd vp = set[0].basis.matrix(), vm = set[1].basis.matrix();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      Eigen::VectorXd a = wp, b = wp;
      a[i] += h;
      b[i] -= h;
      worst = std::max(worst, rel_err(g.w_plus[i], (mu_direct(x, a, vp, wm, vm) - mu_direct(x, b, vp, wm, vm)) / (2 * h)));
      a = wm, b = wm;
      a[i] += h;
      b[i] -= h;
      worst = std::max(worst, rel_err(g.w_minus[i], (mu_direct(x, wp, vp, a, vm) - mu_direct(x, wp, vp, b, vm)) / (2 * h)));
      for (Eigen::Index c = 0; c < r; ++c) {
        Eigen::MatrixXd pa = vp, pb = vp;
        pa(i, c) += h;
        pb(i, c) -= h;
        worst = std::max(worst,
                         rel_err(g.basis_plus(i, c), (mu_direct(x, wp, pa, wm, vm) - mu_direct(x, wp, pb, wm, vm)) / (2 * h)));
        Eigen::MatrixXd ma = vm, mb = vm;
        ma(i, c) += h;
        mb(i, c) -= h;
        worst = std::max(worst,
                         rel_err(g.basis_minus(i, c), (mu_direct(x, wp, vp, wm, ma) - mu_direct(x, wp, vp, wm, mb)) / (2 * h)));
      }
    }
    CAPTURE(cfg);
    CHECK(worst <= 1e-4);
  }
}

TEST_CASE("relevance gradients match central differences") {
  std::mt19937_64 rng(7);
  const double h = 1e-5;
  const Eigen::Index d = 4;
  std::vector<Prototype> protos{{randn(rng, d), Label::diseased, Basis::empty(d)},
                                {randn(rng, d), Label::healthy, Basis::empty(d)}};
  Eigen::MatrixXd omega = Eigen::MatrixXd::Identity(d, d) + 0.3 * Eigen::MatrixXd::Random(d, d);
  PrototypeSet set(Measure::relevance, protos, omega);
  Eigen::VectorXd x = randn(rng, d);
  auto g = glvq_mu_gradient(x, Label::diseased, set);
  auto mu_at = [&](const Eigen::MatrixXd& om) { return glvq_mu(x, Label::diseased, PrototypeSet(Measure::relevance, protos, om)); };
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      Eigen::MatrixXd a = omega, b = omega;
      a(i, j) += h;
      b(i, j) -= h;
      CHECK(rel_err(g.omega(i, j), (mu_at(a) - mu_at(b)) / (2 * h)) <= 1e-4);
    }
}

TEST_CASE("separable blobs are learned with one tangent direction") {
  auto blobs = testdata::two_blobs(1000, 11);
  TrainingConfig cfg;
  cfg.prototypes_per_class = 2;
  cfg.tangent_dim = 1;
  cfg.epochs = 30;
  cfg.seed = 3;
  auto res = train_prototypes(blobs.z, blobs.labels, cfg);
  std::size_t correct = 0;
  Eigen::VectorXd score(blobs.z.rows());
  Eigen::VectorXi y(blobs.z.rows());
  for (Eigen::Index i = 0; i < blobs.z.rows(); ++i) {
    Eigen::VectorXd x = blobs.z.row(i).transpose();
    correct += classify(x, res.prototypes) == blobs.labels[static_cast<std::size_t>(i)];
    score[i] = risk_score(x, res.prototypes);
    y[i] = blobs.labels[static_cast<std::size_t>(i)] == Label::diseased;
  }
  CHECK(static_cast<double>(correct) / 1000.0 >= 0.98);
  CHECK(auc(score, y) >= 0.99);
}

TEST_CASE("cost history never increases") {
  auto blobs = testdata::two_blobs(400, 5, 0.6);
  for (Measure m : {Measure::euclidean, Measure::relevance, Measure::tangent}) {
    TrainingConfig cfg;
    cfg.measure = m;
    cfg.prototypes_per_class = 3;
    cfg.tangent_dim = 1;
    cfg.epochs = 15;
    cfg.lr_prototype = 0.2;
    auto res = train_prototypes(blobs.z, blobs.labels, cfg);
    REQUIRE(res.cost_history.size() == 16);
    for (std::size_t e = 1; e < res.cost_history.size(); ++e) CHECK(res.cost_history[e] <= res.cost_history[e - 1]);
    CHECK(res.cost_history.back() < res.cost_history.front());
    if (m == Measure::relevance) CHECK(res.prototypes.omega().squaredNorm() == doctest::Approx(2.0));
    if (m == Measure::tangent)
      for (const auto& p : res.prototypes.prototypes()) CHECK(Basis::orthonormality_error(p.basis.matrix()) < 1e-10);
  }
}

TEST_CASE("zero epochs returns the initialisation") {
  auto blobs = testdata::two_blobs(200, 9);
  TrainingConfig cfg;
  cfg.epochs = 0;
  cfg.tangent_dim = 1;
  auto init = init_prototypes(blobs.z, blobs.labels, cfg);
  auto res = train_prototypes(blobs.z, blobs.labels, cfg);
  REQUIRE(res.prototypes.size() == init.size());
  for (std::size_t j = 0; j < init.size(); ++j) {
    CHECK(res.prototypes[j].w == init[j].w);
    CHECK(res.prototypes[j].basis == init[j].basis);
  }
  CHECK(res.cost_history.size() == 1);
}

TEST_CASE("training is deterministic for a seed") {
  auto blobs = testdata::two_blobs(300, 2, 1.0);
  TrainingConfig cfg;
  cfg.epochs = 5;
  cfg.tangent_dim = 1;
  auto a = train_prototypes(blobs.z, blobs.labels, cfg), b = train_prototypes(blobs.z, blobs.labels, cfg);
  for (std::size_t j = 0; j < a.prototypes.size(); ++j) CHECK(a.prototypes[j].w == b.prototypes[j].w);
  CHECK(a.cost_history == b.cost_history);
}

TEST_CASE("classification ties go to the lowest index") {
  std::vector<Prototype> p{{Eigen::Vector2d(-1, 0), Label::diseased, Basis::empty(2)},
                           {Eigen::Vector2d(1, 0), Label::healthy, Basis::empty(2)}};
  CHECK(classify(Eigen::VectorXd(Eigen::Vector2d(0, 3)), PrototypeSet(Measure::euclidean, p)) == Label::diseased);
  std::swap(p[0], p[1]);
  CHECK(classify(Eigen::VectorXd(Eigen::Vector2d(0, 3)), PrototypeSet(Measure::euclidean, p)) == Label::healthy);
}

TEST_CASE("infeasible configurations are reported") {
  auto blobs = testdata::two_blobs(20, 1);
  TrainingConfig cfg;
  cfg.tangent_dim = 3;
  CHECK_THROWS_AS(train_prototypes(blobs.z, blobs.labels, cfg), TrainingError);
  cfg.tangent_dim = 1;
  cfg.prototypes_per_class = 11;
  CHECK_THROWS_AS(train_prototypes(blobs.z, blobs.labels, cfg), TrainingError);
  std::vector<Label> one_class(20, Label::healthy);
  cfg.prototypes_per_class = 1;
  CHECK_THROWS_AS(train_prototypes(blobs.z, one_class, cfg), TrainingError);
}
