#include <doctest.h>

#include <random>

#include "protopal/autoencoder.hpp"
#include "protopal/errors.hpp"

using namespace protopal;

TEST_CASE("noise-free autoencoder overfits a tiny cell") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd pts(5, 6);
  for (auto& v : pts.reshaped()) v = g(rng);
  AutoencoderConfig cfg;
  cfg.noise = 0.0;
  cfg.epochs = 3000;
  cfg.learning_rate = 0.01;
  cfg.hidden = 8;
  auto ae = DenoisingAutoencoder::fit(pts, cfg);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    Eigen::VectorXd x = pts.row(i).transpose();
    CHECK((ae.reconstruct(x) - x).squaredNorm() / 6.0 <= 1e-2);
  }
}

TEST_CASE("fitting is deterministic for a seed") {
  Eigen::MatrixXd pts = Eigen::MatrixXd::Random(40, 4);
  AutoencoderConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 9;
  auto a = DenoisingAutoencoder::fit(pts, cfg), b = DenoisingAutoencoder::fit(pts, cfg);
  CHECK(a == b);
  cfg.seed = 10;
  CHECK(!(DenoisingAutoencoder::fit(pts, cfg) == a));
}

TEST_CASE("training reduces reconstruction error") {
  Eigen::MatrixXd pts = Eigen::MatrixXd::Random(200, 5);
  pts.col(4) = pts.col(0) + pts.col(1);
  AutoencoderConfig few, many;
  few.epochs = 1;
  many.epochs = 150;
  CHECK(DenoisingAutoencoder::fit(pts, many).reconstruction_error(pts) <
        DenoisingAutoencoder::fit(pts, few).reconstruction_error(pts));
}

TEST_CASE("shape checks") {
  CHECK_THROWS(DenoisingAutoencoder::fit(Eigen::MatrixXd(0, 3), AutoencoderConfig{}));
  Eigen::MatrixXd pts = Eigen::MatrixXd::Random(10, 3);
  AutoencoderConfig cfg;
  cfg.epochs = 2;
  auto ae = DenoisingAutoencoder::fit(pts, cfg);
  CHECK(ae.input_dim() == 3);
  CHECK(ae.hidden_dim() == 16);
  CHECK_THROWS_AS(ae.encode(Eigen::VectorXd::Zero(4)), DimensionError);
}
