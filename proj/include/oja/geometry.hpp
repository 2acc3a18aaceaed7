#pragma once

#include <Eigen/Cholesky>

#include "oja/linalg.hpp"
#include "oja/types.hpp"

namespace oja {

/// A full-rank n x p matrix (p <= n) together with cached quantities derived
/// from its Gram matrix G = X^T X.
///
/// Construction enforces a relative rank guard: the smallest singular value
/// of X must exceed rank_rtol times the largest, otherwise
/// std::invalid_argument is thrown.  All projector and metric computations
/// reuse the cached Cholesky factor of G, so G is inverted once per iterate.
class Iterate {
 public:
  explicit Iterate(Matrix x, Scalar rank_rtol = 1e-12);

  /// Non-throwing version of the constructor's rank guard.
  static bool full_rank(const Matrix& x, Scalar rank_rtol = 1e-12);

  const Matrix& x() const { return x_; }
  Index rows() const { return x_.rows(); }
  Index cols() const { return x_.cols(); }

  /// Cached Gram matrix X^T X (exactly symmetric).
  const Matrix& gram() const { return gram_; }

  /// Solve (X^T X) Y = rhs via the cached Cholesky factor.
  Matrix gram_solve(const Matrix& rhs) const;

  /// Coefficient matrix (X^T X)^{-1} X^T Z of the projection onto span(X).
  Matrix coefficient(const Matrix& z) const;

 private:
  Matrix x_;
  Matrix gram_;
  Eigen::LLT<Matrix> llt_;
};

/// Projection onto the complement of span(X): Z - X (X^T X)^{-1} X^T Z.
Matrix project_perp(const Iterate& x, const Matrix& z);

/// Projection onto {X S : S symmetric}: X sym((X^T X)^{-1} X^T Z).
Matrix project_sym(const Iterate& x, const Matrix& z);

/// Projection onto the vertical space {X W : W skew}: X skew((X^T X)^{-1} X^T Z).
Matrix project_skew(const Iterate& x, const Matrix& z);

/// Projection onto the horizontal space, i.e. project_perp + project_sym.
Matrix project_horizontal(const Iterate& x, const Matrix& z);

/// True when the vertical component of z is below rtol * ||z||.
bool is_horizontal(const Iterate& x, const Matrix& z, Scalar rtol = 1e-12);

/// Riemannian metric in which the horizontal/vertical split is orthogonal:
///   g(z1, z2) = tr(z1^T Pperp z2) + tr(z1^T X G^{-2} X^T z2).
Scalar noncanonical_metric(const Iterate& x, const Matrix& z1, const Matrix& z2);

/// Distance between the classes [X] and [Y] under orthogonal mixing of
/// columns: min over orthogonal Q of ||X - Y Q||_F (orthogonal Procrustes).
Scalar class_distance(const Matrix& x, const Matrix& y);

}  // namespace oja
