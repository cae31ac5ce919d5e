// Small dense linear-algebra helpers shared by the model and the optimizer.

#pragma once

#include <Eigen/Dense>

#include <stdexcept>

#include "gtwc/types.hpp"

namespace gtwc {

// Solve (I + L) X = B by forward substitution, L strictly lower triangular.
// The system matrix is unit lower triangular, hence always invertible.
inline Matrix unit_lower_solve(const Matrix& l_strict, const Matrix& b) {
  Matrix m = Matrix::Identity(l_strict.rows(), l_strict.cols()) + l_strict;
  return m.triangularView<Eigen::Lower>().solve(b);
}

inline Vector unit_lower_solve(const Matrix& l_strict, const Vector& b) {
  Matrix m = Matrix::Identity(l_strict.rows(), l_strict.cols()) + l_strict;
  return m.triangularView<Eigen::Lower>().solve(b);
}

/// Symmetric PSD square root via eigendecomposition: S = U diag(sqrt(w)) U^T.
///
/// Eigenvalues in (-eig_tol, 0) are treated as roundoff and clamped to zero;
/// anything below -eig_tol rejects the input as not PSD. Symmetry is required
/// up to sym_tol relative to the largest entry.
inline Matrix matrix_sqrt_psd(const Matrix& m, double sym_tol = 1e-10, double eig_tol = 1e-10) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix_sqrt_psd: not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > sym_tol * scale)
    throw std::invalid_argument("matrix_sqrt_psd: input not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) throw std::runtime_error("matrix_sqrt_psd: eigendecomposition failed");
  Vector w = es.eigenvalues();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) < -eig_tol) throw std::invalid_argument("matrix_sqrt_psd: input not PSD");
    if (w(i) < 0.0) w(i) = 0.0;
  }
  return es.eigenvectors() * w.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

inline double smallest_eigenvalue(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sym + sym.transpose()));
  if (es.info() != Eigen::Success) throw std::runtime_error("smallest_eigenvalue: eigendecomposition failed");
  return es.eigenvalues().minCoeff();
}

}  // namespace gtwc
