#pragma once

#include <Eigen/Dense>

namespace oja {

using Scalar = double;
using Index = Eigen::Index;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Column-major flattening of a matrix into a vector.
inline Vector vectorize(const Matrix& z) {
  return Eigen::Map<const Vector>(z.data(), z.size());
}

/// Inverse of vectorize: reshape a vector of length rows*cols into a matrix.
inline Matrix unvectorize(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) {
    throw std::invalid_argument("unvectorize: length does not match rows*cols");
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

}  // namespace oja
