#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace protopal {

struct AutoencoderConfig {
  Eigen::Index hidden = 16;
  double noise = 0.1;  // Gaussian input corruption, standardized units
  std::size_t epochs = 200;
  double learning_rate = 0.005;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  /// Minimum training-set size per prototype neighborhood.
  std::size_t k_min = 30;
  /// decode(encode(.)) passes applied when simulating a twin.
  std::size_t passes = 1;
};

/// One-hidden-layer denoising autoencoder: tanh encoder, linear decoder,
/// trained with Adam on mean squared reconstruction error of corrupted inputs.
class DenoisingAutoencoder {
 public:
  DenoisingAutoencoder() = default;
  DenoisingAutoencoder(Eigen::MatrixXd encoder_weights, Eigen::VectorXd encoder_bias,
                       Eigen::MatrixXd decoder_weights, Eigen::VectorXd decoder_bias);

  /// Trains on the rows of `samples` (n x d, standardized).
  static DenoisingAutoencoder fit(const Eigen::MatrixXd& samples, const AutoencoderConfig& config);

  Eigen::Index input_dim() const { return enc_w_.cols(); }
  Eigen::Index hidden_dim() const { return enc_w_.rows(); }

  Eigen::VectorXd encode(const Eigen::VectorXd& x) const;
  Eigen::VectorXd decode(const Eigen::VectorXd& h) const;
  Eigen::VectorXd reconstruct(const Eigen::VectorXd& x) const { return decode(encode(x)); }
  /// Mean squared reconstruction error over rows, without corruption.
  double reconstruction_error(const Eigen::MatrixXd& samples) const;

  const Eigen::MatrixXd& encoder_weights() const { return enc_w_; }
  const Eigen::VectorXd& encoder_bias() const { return enc_b_; }
  const Eigen::MatrixXd& decoder_weights() const { return dec_w_; }
  const Eigen::VectorXd& decoder_bias() const { return dec_b_; }

  bool operator==(const DenoisingAutoencoder& o) const {
    return enc_w_ == o.enc_w_ && enc_b_ == o.enc_b_ && dec_w_ == o.dec_w_ && dec_b_ == o.dec_b_;
  }

 private:
  Eigen::MatrixXd enc_w_;  // h x d
  Eigen::VectorXd enc_b_;
  Eigen::MatrixXd dec_w_;  // d x h
  Eigen::VectorXd dec_b_;
};

}  // namespace protopal
