#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "protopal/errors.hpp"
#include "protopal/synthetic.hpp"

using namespace protopal;

namespace {

GeneratorConfig one_disease(std::map<std::string, double> beta, double intercept, std::size_t n, std::uint64_t seed) {
  auto cfg = GeneratorConfig::defaults();
  cfg.n = n;
  cfg.seed = seed;
  cfg.diseases = {{"E11", disease_name("E11"), intercept, std::move(beta), {}, 0.0}};
  return cfg;
}

}  // namespace

TEST_CASE("same seed gives identical cohorts, different seed does not") {
  auto cfg = GeneratorConfig::defaults();
  cfg.n = 300;
  cfg.seed = 5;
  std::ostringstream a, b, c;
  write_cohort(a, generate_synthetic_cohort(cfg));
  write_cohort(b, generate_synthetic_cohort(cfg));
  cfg.seed = 6;
  write_cohort(c, generate_synthetic_cohort(cfg));
  CHECK(a.str() == b.str());
  CHECK(a.str() != c.str());
}

TEST_CASE("generated values conform to the schema") {
  auto cfg = GeneratorConfig::defaults();
  cfg.n = 500;
  auto ds = generate_synthetic_cohort(cfg);
  for (const auto& ind : ds.individuals()) CHECK(ds.schema().conforms(ind.values));
}

TEST_CASE("zero weights give prevalence near one half") {
  auto ds = generate_synthetic_cohort(one_disease({}, 0.0, 10000, 3));
  double diseased = 0;
  for (const auto& ind : ds.individuals()) diseased += ind.outcomes.at("E11").label == Label::diseased;
  CHECK(std::abs(diseased / 10000.0 - 0.5) <= 0.03);
}

TEST_CASE("strong planted weights give a near-perfect planted score") {
  auto cohort = generate_planted_cohort(one_disease({{"glucose", 6.0}, {"bmi", 4.0}}, 0.0, 5000, 9));
  const auto& eta = cohort.planted_scores.at("E11");
  Eigen::VectorXi y(eta.size());
  for (Eigen::Index i = 0; i < y.size(); ++i)
    y[i] = cohort.dataset[static_cast<std::size_t>(i)].outcomes.at("E11").label == Label::diseased;
  CHECK(oracle::auc_pairs(eta, y) >= 0.97);
}

TEST_CASE("censoring happens at the drawn-time horizon") {
  auto cohort = generate_planted_cohort(one_disease({{"glucose", 1.0}}, -1.0, 4000, 2));
  const double horizon = cohort.horizons.at("E11");
  std::size_t censored = 0;
  for (const auto& ind : cohort.dataset.individuals()) {
    const auto& o = ind.outcomes.at("E11");
    REQUIRE(o.event_time);
    CHECK(*o.event_time <= horizon);
    if (*o.censored) {
      ++censored;
      CHECK(*o.event_time == horizon);
    }
  }
  CHECK(censored == doctest::Approx(400).epsilon(0.05));
}

TEST_CASE("planted coupling shifts labs with lifestyle") {
  auto cfg = GeneratorConfig::defaults();
  cfg.n = 4000;
  auto ds = generate_synthetic_cohort(cfg);
  const auto a = ds.schema().require_index("alcohol"), g = ds.schema().require_index("ggt");
  Eigen::MatrixXd m = ds.matrix();
  Eigen::VectorXd ac = m.col(static_cast<Eigen::Index>(a)).array() - m.col(static_cast<Eigen::Index>(a)).mean();
  Eigen::VectorXd gc = m.col(static_cast<Eigen::Index>(g)).array() - m.col(static_cast<Eigen::Index>(g)).mean();
  CHECK(ac.dot(gc) / (ac.norm() * gc.norm()) > 0.3);
}

TEST_CASE("unknown features in the planted weights are rejected") {
  CHECK_THROWS_AS(generate_synthetic_cohort(one_disease({{"nope", 1.0}}, 0.0, 10, 1)), SchemaError);
}

TEST_CASE("config survives JSON") {
  auto cfg = GeneratorConfig::defaults();
  cfg.seed = 77;
  auto back = GeneratorConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  std::ostringstream a, b;
  write_cohort(a, generate_synthetic_cohort(cfg));
  write_cohort(b, generate_synthetic_cohort(back));
  CHECK(a.str() == b.str());
}
