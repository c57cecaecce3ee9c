#pragma once

#include "ttofs/core.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>

namespace ttofs {

struct NormPair {
  double spectral = 0.0;
  double frobenius = 0.0;
};

/// Singular values in ascending order, σ₁ ≤ … ≤ σₙ.
template <typename Derived>
RealVector singular_values(const Eigen::MatrixBase<Derived>& a) {
  using Plain = typename Derived::PlainObject;
  if (a.size() == 0) return RealVector();
  Eigen::BDCSVD<Plain> svd(a.eval());
  return svd.singularValues().reverse();
}

template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a).maxCoeff();
}

template <typename Derived>
double sigma_min(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a).minCoeff();
}

template <typename Derived>
NormPair norms(const Eigen::MatrixBase<Derived>& a) {
  return {spectral_norm(a), a.norm()};
}

/// Largest |eigenvalue| of a Hermitian matrix; cheaper than an SVD.
template <typename Derived>
double hermitian_norm(const Eigen::MatrixBase<Derived>& a) {
  using Plain = typename Derived::PlainObject;
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Plain> es(a.eval(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace detail {

// Triangular factor T with f = Q T, Q having orthonormal columns.
inline Matrix column_space_factor(const Matrix& f) {
  if (f.rows() <= f.cols()) return f;
  Eigen::HouseholderQR<Matrix> qr(f);
  return qr.matrixQR().topRows(f.cols()).triangularView<Eigen::Upper>();
}

}  // namespace detail

/// Norms of left * core * right^* without forming the (possibly huge) product.
inline NormPair factored_norms(const Matrix& left, const Matrix& core, const Matrix& right) {
  const Matrix reduced = detail::column_space_factor(left) * core *
                         detail::column_space_factor(right).adjoint();
  return norms(reduced);
}

/// Drops columns whose Euclidean norm is below `cutoff`. Dropped columns
/// perturb A A^* by at most the sum of their squared norms.
inline Matrix significant_columns(const Matrix& a, double cutoff) {
  Eigen::Index keep = a.cols();
  while (keep > 0 && a.col(keep - 1).norm() < cutoff) --keep;
  return a.leftCols(keep);
}

/// ‖A A^* − B B^*‖ via a factored Gram difference.
inline NormPair gram_difference_norms(const Matrix& a, const Matrix& b) {
  Matrix stacked(a.rows(), a.cols() + b.cols());
  stacked << a, b;
  Matrix core = Matrix::Zero(stacked.cols(), stacked.cols());
  core.topLeftCorner(a.cols(), a.cols()).setIdentity();
  core.bottomRightCorner(b.cols(), b.cols()) = -Matrix::Identity(b.cols(), b.cols());
  return factored_norms(stacked, core, stacked);
}

/// Next power of two ≥ n (n ≥ 1).
inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace ttofs
