#include "oja/geometry.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace oja {
namespace {

void check_tangent_shape(const Iterate& x, const Matrix& z, const char* who) {
  if (z.rows() != x.rows() || z.cols() != x.cols()) {
    throw std::invalid_argument(std::string(who) + ": tangent shape must match the iterate");
  }
}

// Smallest/largest eigenvalue of the Gram matrix; used for the rank guard
// (singular values of X are the square roots of these).
bool gram_full_rank(const Matrix& gram, Scalar rank_rtol) {
  const SymmetricEigen eig = jacobi_eigen(gram);
  const Scalar lo = eig.values(eig.values.size() - 1);
  const Scalar hi = eig.values(0);
  return hi > 0 && lo > rank_rtol * rank_rtol * hi;
}

}  // namespace

Iterate::Iterate(Matrix x, Scalar rank_rtol) : x_(std::move(x)) {
  if (x_.rows() < 1 || x_.cols() < 1 || x_.cols() > x_.rows()) {
    throw std::invalid_argument("Iterate: matrix must be tall (rows >= cols >= 1)");
  }
  if (!x_.allFinite()) {
    throw std::invalid_argument("Iterate: matrix must be finite");
  }
  gram_ = x_.transpose() * x_;
  gram_ = Scalar(0.5) * (gram_ + gram_.transpose());
  if (!gram_full_rank(gram_, rank_rtol)) {
    throw std::invalid_argument("Iterate: rank guard failed (matrix numerically rank deficient)");
  }
  llt_.compute(gram_);
  if (llt_.info() != Eigen::Success) {
    throw std::invalid_argument("Iterate: Gram matrix is not positive definite");
  }
}

bool Iterate::full_rank(const Matrix& x, Scalar rank_rtol) {
  if (x.rows() < 1 || x.cols() < 1 || x.cols() > x.rows() || !x.allFinite()) return false;
  Matrix gram = x.transpose() * x;
  gram = Scalar(0.5) * (gram + gram.transpose());
  return gram_full_rank(gram, rank_rtol);
}

Matrix Iterate::gram_solve(const Matrix& rhs) const {
  if (rhs.rows() != gram_.rows()) {
    throw std::invalid_argument("Iterate::gram_solve: row count must equal cols of the iterate");
  }
  return llt_.solve(rhs);
}

Matrix Iterate::coefficient(const Matrix& z) const {
  check_tangent_shape(*this, z, "Iterate::coefficient");
  return llt_.solve(x_.transpose() * z);
}

Matrix project_perp(const Iterate& x, const Matrix& z) {
  check_tangent_shape(x, z, "project_perp");
  return z - x.x() * x.coefficient(z);
}

Matrix project_sym(const Iterate& x, const Matrix& z) {
  check_tangent_shape(x, z, "project_sym");
  return x.x() * sym(x.coefficient(z));
}

Matrix project_skew(const Iterate& x, const Matrix& z) {
  check_tangent_shape(x, z, "project_skew");
  return x.x() * skew(x.coefficient(z));
}

Matrix project_horizontal(const Iterate& x, const Matrix& z) {
  check_tangent_shape(x, z, "project_horizontal");
  return z - x.x() * skew(x.coefficient(z));
}

bool is_horizontal(const Iterate& x, const Matrix& z, Scalar rtol) {
  check_tangent_shape(x, z, "is_horizontal");
  const Scalar zn = z.norm();
  if (zn == 0) return true;
  return project_skew(x, z).norm() <= rtol * zn;
}

Scalar noncanonical_metric(const Iterate& x, const Matrix& z1, const Matrix& z2) {
  check_tangent_shape(x, z1, "noncanonical_metric");
  check_tangent_shape(x, z2, "noncanonical_metric");
  // tr(z1^T Pperp z2) plus tr(z1^T X G^{-2} X^T z2); the second trace equals
  // the Frobenius inner product of the two coefficient matrices G^{-1} X^T z.
  const Matrix c1 = x.gram_solve(x.x().transpose() * z1);
  const Matrix c2 = x.gram_solve(x.x().transpose() * z2);
  const Scalar perp_part = (z1.array() * project_perp(x, z2).array()).sum();
  const Scalar span_part = (c1.array() * c2.array()).sum();
  return perp_part + span_part;
}

Scalar class_distance(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw std::invalid_argument("class_distance: shapes must match");
  }
  // Orthogonal Procrustes: the minimizing Q is the polar factor of Y^T X.
  const Matrix m = y.transpose() * x;
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix q = svd.matrixU() * svd.matrixV().transpose();
  return (x - y * q).norm();
}

}  // namespace oja
