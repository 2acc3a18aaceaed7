#include "oja/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace oja {
namespace {

// Frobenius norm of the off-diagonal part.
Scalar offdiag_norm(const Matrix& a) {
  Scalar sum = 0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

// Sort eigenpairs descending and apply the sign convention in place.
void canonicalize(Vector& values, Matrix& vectors) {
  const Index n = values.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values(a) > values(b); });

  Vector sorted_values(n);
  Matrix sorted_vectors(vectors.rows(), n);
  for (Index k = 0; k < n; ++k) {
    sorted_values(k) = values(order[static_cast<std::size_t>(k)]);
    sorted_vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }

  // Make the first entry of largest magnitude in each column positive.
  for (Index j = 0; j < n; ++j) {
    Index arg = 0;
    Scalar best = std::abs(sorted_vectors(0, j));
    for (Index i = 1; i < sorted_vectors.rows(); ++i) {
      const Scalar mag = std::abs(sorted_vectors(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (sorted_vectors(arg, j) < 0) sorted_vectors.col(j) = -sorted_vectors.col(j);
  }

  values.swap(sorted_values);
  vectors.swap(sorted_vectors);
}

}  // namespace

SymmetricEigen jacobi_eigen(const Matrix& symmetric, int max_sweeps) {
  if (symmetric.rows() != symmetric.cols()) {
    throw std::invalid_argument("jacobi_eigen: matrix must be square");
  }
  if (!symmetric.allFinite()) {
    throw std::invalid_argument("jacobi_eigen: matrix must be finite");
  }
  const Index n = symmetric.rows();

  // Work on an exactly symmetric copy so rotations stay consistent.
  Matrix a = Scalar(0.5) * (symmetric + symmetric.transpose());
  Matrix v = Matrix::Identity(n, n);

  const Scalar scale = a.norm();
  const Scalar off_tol =
      scale * static_cast<Scalar>(n) * std::numeric_limits<Scalar>::epsilon();

  if (n == 1 || scale == 0) {
    SymmetricEigen out{a.diagonal(), v};
    canonicalize(out.values, out.vectors);
    return out;
  }

  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (offdiag_norm(a) <= off_tol) {
      converged = true;
      break;
    }
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (std::abs(apq) <= std::numeric_limits<Scalar>::min()) continue;

        // Classic two-sided rotation choosing the smaller angle.
        const Scalar theta = (a(q, q) - a(p, p)) / (2 * apq);
        const Scalar t =
            (theta >= 0 ? Scalar(1) : Scalar(-1)) /
            (std::abs(theta) + std::sqrt(theta * theta + 1));
        const Scalar c = 1 / std::sqrt(t * t + 1);
        const Scalar s = t * c;
        const Scalar tau = s / (1 + c);

        const Scalar app = a(p, p);
        const Scalar aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0;
        a(q, p) = 0;
        for (Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const Scalar arp = a(r, p);
          const Scalar arq = a(r, q);
          a(r, p) = arp - s * (arq + tau * arp);
          a(p, r) = a(r, p);
          a(r, q) = arq + s * (arp - tau * arq);
          a(q, r) = a(r, q);
        }
        for (Index r = 0; r < n; ++r) {
          const Scalar vrp = v(r, p);
          const Scalar vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }
  if (!converged && offdiag_norm(a) > off_tol) {
    throw std::runtime_error("jacobi_eigen: no convergence within sweep budget");
  }

  SymmetricEigen out{a.diagonal(), v};
  canonicalize(out.values, out.vectors);
  return out;
}

SpdMatrix::SpdMatrix(const Matrix& a, Scalar gap_tol) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw std::invalid_argument("SpdMatrix: matrix must be square and nonempty");
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("SpdMatrix: matrix must be finite");
  }
  symmetry_defect_ = (a - a.transpose()).norm();
  a_ = Scalar(0.5) * (a + a.transpose());

  const SymmetricEigen eig = jacobi_eigen(a_);
  const Index n = a_.rows();
  if (eig.values(n - 1) <= 0) {
    throw std::invalid_argument("SpdMatrix: eigenvalues must be strictly positive");
  }
  for (Index i = 0; i + 1 < n; ++i) {
    if (eig.values(i) - eig.values(i + 1) <= gap_tol) {
      throw std::invalid_argument("SpdMatrix: eigenvalues must be simple (gap too small)");
    }
  }
}

SpectralDecomposition spectral_decompose(const SpdMatrix& a) {
  SymmetricEigen eig = jacobi_eigen(a.matrix());
  return SpectralDecomposition{std::move(eig.values), std::move(eig.vectors)};
}

Matrix haar_orthogonal(Index n, RngStream& rng) {
  if (n < 1) {
    throw std::invalid_argument("haar_orthogonal: dimension must be positive");
  }
  const Matrix g = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().template triangularView<Eigen::Upper>();
  // Fix the QR sign ambiguity so the distribution is exactly Haar.
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

SpdMatrix random_spd_uniform(Index n, RngStream& rng, Scalar gap_floor) {
  if (n < 2) {
    throw std::invalid_argument("random_spd_uniform: dimension must be at least 2");
  }
  Vector lambda(n);
  while (true) {
    for (Index i = 0; i < n; ++i) lambda(i) = rng.uniform01();
    std::sort(lambda.data(), lambda.data() + n, std::greater<Scalar>());
    Scalar min_gap = std::numeric_limits<Scalar>::infinity();
    for (Index i = 0; i + 1 < n; ++i) min_gap = std::min(min_gap, lambda(i) - lambda(i + 1));
    if (min_gap > gap_floor) break;
  }
  const Matrix q = haar_orthogonal(n, rng);
  return SpdMatrix(q * lambda.asDiagonal() * q.transpose());
}

}  // namespace oja
