#include "protopal/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "protopal/errors.hpp"

namespace protopal {

namespace {

struct AdamState {
  Eigen::MatrixXd m, v;
  explicit AdamState(Eigen::Index rows, Eigen::Index cols)
      : m(Eigen::MatrixXd::Zero(rows, cols)), v(Eigen::MatrixXd::Zero(rows, cols)) {}

  template <typename Param>
  void step(Param& param, const Eigen::MatrixXd& grad, double lr, std::size_t t) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
    double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    param -= (lr * (m / c1).array() / ((v / c2).array().sqrt() + eps)).matrix();
  }
};

}  // namespace

DenoisingAutoencoder::DenoisingAutoencoder(Eigen::MatrixXd encoder_weights, Eigen::VectorXd encoder_bias,
                                           Eigen::MatrixXd decoder_weights, Eigen::VectorXd decoder_bias)
    : enc_w_(std::move(encoder_weights)),
      enc_b_(std::move(encoder_bias)),
      dec_w_(std::move(decoder_weights)),
      dec_b_(std::move(decoder_bias)) {
  if (enc_b_.size() != enc_w_.rows() || dec_w_.rows() != enc_w_.cols() || dec_w_.cols() != enc_w_.rows() ||
      dec_b_.size() != dec_w_.rows())
    throw DimensionError("autoencoder weight shapes are inconsistent");
  if (!enc_w_.allFinite() || !enc_b_.allFinite() || !dec_w_.allFinite() || !dec_b_.allFinite())
    throw Error("autoencoder weights must be finite");
}

DenoisingAutoencoder DenoisingAutoencoder::fit(const Eigen::MatrixXd& samples, const AutoencoderConfig& cfg) {
  const Eigen::Index n = samples.rows(), d = samples.cols(), h = cfg.hidden;
  if (n == 0) throw Error("autoencoder needs at least one training sample");
  if (h <= 0 || cfg.batch_size == 0 || !(cfg.learning_rate > 0.0) || cfg.noise < 0.0)
    throw Error("invalid autoencoder configuration");

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double limit = std::sqrt(6.0 / static_cast<double>(d + h));
  Eigen::MatrixXd w1 = Eigen::MatrixXd::NullaryExpr(h, d, [&] { return limit * unif(rng); });
  Eigen::VectorXd b1 = Eigen::VectorXd::Zero(h);
  Eigen::MatrixXd w2 = Eigen::MatrixXd::NullaryExpr(d, h, [&] { return limit * unif(rng); });
  Eigen::VectorXd b2 = samples.colwise().mean().transpose();

  AdamState s_w1(h, d), s_b1(h, 1), s_w2(d, h), s_b2(d, 1);
  const Eigen::MatrixXd data = samples.transpose();  // d x n, column per sample
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto batch = static_cast<Eigen::Index>(std::min<std::size_t>(cfg.batch_size, static_cast<std::size_t>(n)));

  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index b = std::min(batch, n - start);
      Eigen::MatrixXd clean(d, b);
      for (Eigen::Index k = 0; k < b; ++k) clean.col(k) = data.col(order[static_cast<std::size_t>(start + k)]);
      Eigen::MatrixXd noisy = clean;
      if (cfg.noise > 0.0) noisy += Eigen::MatrixXd::NullaryExpr(d, b, [&] { return cfg.noise * normal(rng); });

      Eigen::MatrixXd hidden = ((w1 * noisy).colwise() + b1).array().tanh().matrix();
      Eigen::MatrixXd out = (w2 * hidden).colwise() + b2;
      Eigen::MatrixXd d_out = (2.0 / static_cast<double>(b * d)) * (out - clean);
      Eigen::MatrixXd g_w2 = d_out * hidden.transpose();
      Eigen::VectorXd g_b2 = d_out.rowwise().sum();
      Eigen::MatrixXd d_pre = ((w2.transpose() * d_out).array() * (1.0 - hidden.array().square())).matrix();
      Eigen::MatrixXd g_w1 = d_pre * noisy.transpose();
      Eigen::VectorXd g_b1 = d_pre.rowwise().sum();

      ++t;
      s_w1.step(w1, g_w1, cfg.learning_rate, t);
      s_b1.step(b1, g_b1, cfg.learning_rate, t);
      s_w2.step(w2, g_w2, cfg.learning_rate, t);
      s_b2.step(b2, g_b2, cfg.learning_rate, t);
    }
    if (!w1.allFinite() || !w2.allFinite())
      throw TrainingError("autoencoder weights diverged at epoch " + std::to_string(epoch));
  }
  return DenoisingAutoencoder(std::move(w1), std::move(b1), std::move(w2), std::move(b2));
}

Eigen::VectorXd DenoisingAutoencoder::encode(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim()) throw DimensionError("autoencoder input dimension mismatch");
  return (enc_w_ * x + enc_b_).array().tanh().matrix();
}

Eigen::VectorXd DenoisingAutoencoder::decode(const Eigen::VectorXd& h) const {
  if (h.size() != hidden_dim()) throw DimensionError("autoencoder code dimension mismatch");
  return dec_w_ * h + dec_b_;
}

double DenoisingAutoencoder::reconstruction_error(const Eigen::MatrixXd& samples) const {
  if (samples.rows() == 0) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < samples.rows(); ++i)
    total += (reconstruct(samples.row(i).transpose()) - samples.row(i).transpose()).squaredNorm();
  return total / static_cast<double>(samples.rows() * samples.cols());
}

}  // namespace protopal
