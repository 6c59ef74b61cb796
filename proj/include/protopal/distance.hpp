#pragma once

#include <cmath>
#include <string>

#include <Eigen/Core>
#include <Eigen/QR>

#include "protopal/errors.hpp"

// Squared distance measures shared by every GLVQ variant. All functions take
// Eigen expressions and return the scalar type of their first argument.

namespace protopal {

namespace detail {
inline void require_same_size(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b)
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
}
}  // namespace detail

template <typename DerivedX, typename DerivedW>
typename DerivedX::Scalar euclidean_sq(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedW>& w) {
  detail::require_same_size(x.size(), w.size(), "euclidean_sq");
  return (x - w).squaredNorm();
}

/// ||Omega (x - w)||^2 for a full relevance matrix Omega.
template <typename DerivedX, typename DerivedW, typename DerivedO>
typename DerivedX::Scalar relevance_dist_sq(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedW>& w,
                                            const Eigen::MatrixBase<DerivedO>& omega) {
  detail::require_same_size(x.size(), w.size(), "relevance_dist_sq");
  detail::require_same_size(omega.cols(), x.size(), "relevance_dist_sq");
  return (omega * (x - w)).squaredNorm();
}

/// d x r matrix with orthonormal columns spanning a prototype's tangent space.
template <typename Scalar>
class TangentBasis {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  static constexpr double kOrthonormalTolerance = 1e-8;

  TangentBasis() = default;

  /// Zero-dimensional basis (tangent distance degenerates to Euclidean).
  static TangentBasis empty(Eigen::Index dim) { return TangentBasis(Matrix(dim, 0)); }

  /// Wraps an already orthonormal matrix; throws DegenerateBasisError otherwise.
  static TangentBasis from_orthonormal(Matrix v) {
    if (v.cols() > v.rows()) throw DegenerateBasisError("tangent basis has more columns than rows");
    if (orthonormality_error(v) > kOrthonormalTolerance)
      throw DegenerateBasisError("tangent basis columns are not orthonormal");
    return TangentBasis(std::move(v));
  }

  static Scalar orthonormality_error(const Matrix& v) {
    if (v.cols() == 0) return Scalar(0);
    Matrix gram = v.transpose() * v;
    gram -= Matrix::Identity(v.cols(), v.cols());
    return gram.cwiseAbs().maxCoeff();
  }

  Eigen::Index dimension() const { return v_.rows(); }
  Eigen::Index rank() const { return v_.cols(); }
  const Matrix& matrix() const { return v_; }

  bool operator==(const TangentBasis& o) const {
    return v_.rows() == o.v_.rows() && v_.cols() == o.v_.cols() && v_ == o.v_;
  }

 private:
  explicit TangentBasis(Matrix v) : v_(std::move(v)) {}
  Matrix v_;
};

using Basis = TangentBasis<double>;

/// Residual (I - V V') (x - w) of x against the affine subspace {w + V theta}.
template <typename DerivedX, typename DerivedW, typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tangent_residual(const Eigen::MatrixBase<DerivedX>& x,
                                                          const Eigen::MatrixBase<DerivedW>& w,
                                                          const TangentBasis<Scalar>& basis) {
  detail::require_same_size(x.size(), w.size(), "tangent_dist_sq");
  detail::require_same_size(basis.dimension(), x.size(), "tangent_dist_sq");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> r = x - w;
  if (basis.rank() > 0) r -= basis.matrix() * (basis.matrix().transpose() * r);
  return r;
}

template <typename DerivedX, typename DerivedW, typename Scalar>
Scalar tangent_dist_sq(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedW>& w,
                       const TangentBasis<Scalar>& basis) {
  return tangent_residual(x, w, basis).squaredNorm();
}

/// QR-based orthonormalization preserving the column span. Column signs are
/// chosen so an already orthonormal input is returned unchanged up to rounding.
template <typename Derived>
TangentBasis<typename Derived::Scalar> orthonormalize(const Eigen::MatrixBase<Derived>& raw) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index d = raw.rows(), r = raw.cols();
  if (r > d) throw DegenerateBasisError("cannot orthonormalize more columns than dimensions");
  if (r == 0) return TangentBasis<Scalar>::empty(d);
  if (!raw.allFinite()) throw DegenerateBasisError("tangent basis contains non-finite entries");

  Matrix a = raw;
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix rr = qr.matrixQR().topRows(r).template triangularView<Eigen::Upper>();
  Scalar col_scale = a.colwise().norm().maxCoeff();
  for (Eigen::Index j = 0; j < r; ++j)
    if (!(std::abs(rr(j, j)) > Scalar(1e-10) * col_scale))
      throw DegenerateBasisError("tangent basis is rank deficient");

  Matrix q = qr.householderQ() * Matrix::Identity(d, r);
  for (Eigen::Index j = 0; j < r; ++j)
    if (rr(j, j) < Scalar(0)) q.col(j) = -q.col(j);
  // One Gram-Schmidt refinement pass keeps the invariant well inside 1e-8.
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
    q.col(j).normalize();
  }
  return TangentBasis<Scalar>::from_orthonormal(std::move(q));
}

}  // namespace protopal
