#pragma once

#include <random>
#include <vector>

#include <Eigen/Core>

#include "protopal/schema.hpp"

namespace testdata {

struct Blobs {
  Eigen::MatrixXd z;
  std::vector<protopal::Label> labels;
};

/// Two elongated Gaussian blobs, separated along x, stretched along y.
inline Blobs two_blobs(std::size_t n, std::uint64_t seed, double gap = 2.0, double sx = 0.5, double sy = 1.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gx(0.0, sx), gy(0.0, sy);
  Blobs b;
  b.z.resize(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const bool diseased = i % 2 == 0;
    b.z(static_cast<Eigen::Index>(i), 0) = (diseased ? gap : -gap) + gx(rng);
    b.z(static_cast<Eigen::Index>(i), 1) = gy(rng);
    b.labels.push_back(diseased ? protopal::Label::diseased : protopal::Label::healthy);
  }
  return b;
}

}  // namespace testdata
