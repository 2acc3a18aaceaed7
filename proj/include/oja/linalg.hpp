#pragma once

#include <stdexcept>

#include "oja/rng.hpp"
#include "oja/types.hpp"

namespace oja {

/// Symmetric part (B + B^T)/2 of a square matrix.
template <typename Derived>
Matrix sym(const Eigen::MatrixBase<Derived>& b) {
  if (b.rows() != b.cols()) {
    throw std::invalid_argument("sym: matrix must be square");
  }
  return Scalar(0.5) * (b + b.transpose()).eval();
}

/// Skew-symmetric part (B - B^T)/2 of a square matrix.
template <typename Derived>
Matrix skew(const Eigen::MatrixBase<Derived>& b) {
  if (b.rows() != b.cols()) {
    throw std::invalid_argument("skew: matrix must be square");
  }
  return Scalar(0.5) * (b - b.transpose()).eval();
}

/// Eigendecomposition of a symmetric matrix: values sorted in descending
/// order, vectors stored as the matching orthonormal columns.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Rotations sweep the strict upper triangle row by row until the
/// off-diagonal Frobenius mass falls below n*eps times the matrix norm.
/// Throws std::runtime_error if the sweep budget is exhausted first; for the
/// small dimensions this project targets a handful of sweeps suffices, so the
/// default budget is generous rather than tight.
///
/// Column signs follow a fixed convention — the entry of largest magnitude in
/// each eigenvector (first such entry on ties) is made positive — so results
/// are deterministic and comparable across runs.
SymmetricEigen jacobi_eigen(const Matrix& symmetric, int max_sweeps = 30);

/// Symmetric positive definite matrix with simple spectrum.
///
/// The constructor symmetrizes its input (recording the symmetry defect of
/// what was passed in), then validates via an eigendecomposition that all
/// eigenvalues are strictly positive and pairwise separated by more than
/// gap_tol.  Violations raise std::invalid_argument.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Matrix& a, Scalar gap_tol = 1e-12);

  Index dim() const { return a_.rows(); }
  const Matrix& matrix() const { return a_; }

  /// Frobenius norm of (input - input^T), recorded before symmetrization.
  Scalar symmetry_defect() const { return symmetry_defect_; }

 private:
  Matrix a_;
  Scalar symmetry_defect_ = 0;
};

/// Full spectral factorization A = W diag(lambda) W^T with eigenvalues in
/// descending order and deterministically signed orthonormal eigenvectors.
struct SpectralDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;
};

SpectralDecomposition spectral_decompose(const SpdMatrix& a);

/// Orthogonal matrix drawn from the Haar (rotation-invariant) distribution:
/// QR of a Gaussian matrix with the R-diagonal sign ambiguity fixed.
Matrix haar_orthogonal(Index n, RngStream& rng);

/// Random SPD test matrix: eigenvalues drawn uniformly from (0, 1] and
/// redrawn as a batch until every adjacent gap (after sorting) exceeds
/// gap_floor, then conjugated by a Haar orthogonal matrix.  Requires n >= 2.
SpdMatrix random_spd_uniform(Index n, RngStream& rng, Scalar gap_floor = 1e-6);

}  // namespace oja
