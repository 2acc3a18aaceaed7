#include "oja/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oja {

std::pair<Matrix, KrylovStats> krylov_solve(const LinearOperator& op, const Matrix& rhs,
                                            Scalar tol, int restart, int max_iterations) {
  if (!op.apply || op.rows < 1 || op.cols < 1) {
    throw std::invalid_argument("krylov_solve: operator is empty");
  }
  if (rhs.rows() != op.rows || rhs.cols() != op.cols) {
    throw std::invalid_argument("krylov_solve: rhs shape does not match operator");
  }
  if (!rhs.allFinite()) {
    throw std::invalid_argument("krylov_solve: rhs must be finite");
  }
  if (!(tol >= 0)) {
    throw std::invalid_argument("krylov_solve: tolerance must be nonnegative");
  }

  const Index dim = op.rows * op.cols;
  const int m_max = static_cast<int>(std::min<Index>(std::max(restart, 1), dim));
  const int budget = max_iterations > 0 ? max_iterations : static_cast<int>(dim);

  KrylovStats st;
  const Vector b = vectorize(rhs);
  const Scalar b_norm = b.norm();
  Vector xv = Vector::Zero(dim);
  if (b_norm == 0) {
    st.converged = true;
    return {unvectorize(xv, op.rows, op.cols), st};
  }

  const auto apply_vec = [&](const Vector& v) {
    return vectorize(op.apply(unvectorize(v, op.rows, op.cols)));
  };

  Scalar prev_cycle_residual = std::numeric_limits<Scalar>::infinity();
  while (true) {
    const Vector r = st.restarts == 0 ? b : Vector(b - apply_vec(xv));
    const Scalar rho = r.norm();
    st.relative_residual = rho / b_norm;
    if (st.relative_residual <= tol) {
      st.converged = true;
      break;
    }
    if (st.iterations >= budget) break;
    if (rho >= Scalar(0.999) * prev_cycle_residual) {
      st.stagnated = true;
      break;
    }
    prev_cycle_residual = rho;

    const int m = std::min<int>(m_max, budget - st.iterations);
    Matrix v(dim, m + 1);
    Matrix h = Matrix::Zero(m + 1, m);
    std::vector<Scalar> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m));
    Vector g = Vector::Zero(m + 1);
    g(0) = rho;
    v.col(0) = r / rho;

    int k = 0;
    for (int j = 0; j < m; ++j) {
      Vector w = apply_vec(v.col(j));
      ++st.iterations;
      const Scalar w_scale = w.norm();
      for (int i = 0; i <= j; ++i) {
        const Scalar hij = v.col(i).dot(w);
        h(i, j) = hij;
        w -= hij * v.col(i);
      }
      for (int i = 0; i <= j; ++i) {  // reorthogonalization pass
        const Scalar corr = v.col(i).dot(w);
        h(i, j) += corr;
        w -= corr * v.col(i);
      }
      const Scalar h_next = w.norm();
      h(j + 1, j) = h_next;
      const bool happy = h_next <= Scalar(1e-14) * std::max(w_scale, b_norm);

      // Fold the new column into the triangular least-squares problem.
      for (int i = 0; i < j; ++i) {
        const Scalar tmp = cs[static_cast<std::size_t>(i)] * h(i, j) +
                           sn[static_cast<std::size_t>(i)] * h(i + 1, j);
        h(i + 1, j) = -sn[static_cast<std::size_t>(i)] * h(i, j) +
                      cs[static_cast<std::size_t>(i)] * h(i + 1, j);
        h(i, j) = tmp;
      }
      const Scalar denom = std::hypot(h(j, j), h(j + 1, j));
      if (denom == 0) {
        // The operator annihilated this direction entirely; drop the column
        // so the triangular solve stays well posed.
        k = j;
        st.breakdown = true;
        break;
      }
      cs[static_cast<std::size_t>(j)] = h(j, j) / denom;
      sn[static_cast<std::size_t>(j)] = h(j + 1, j) / denom;
      h(j, j) = denom;
      h(j + 1, j) = 0;
      g(j + 1) = -sn[static_cast<std::size_t>(j)] * g(j);
      g(j) = cs[static_cast<std::size_t>(j)] * g(j);

      k = j + 1;
      if (happy) {
        st.breakdown = true;
        break;
      }
      if (std::abs(g(j + 1)) <= tol * b_norm || st.iterations >= budget) break;
      v.col(j + 1) = w / h_next;
    }

    const Vector y =
        h.topLeftCorner(k, k).template triangularView<Eigen::Upper>().solve(g.head(k));
    xv += v.leftCols(k) * y;
    ++st.restarts;
  }

  st.relative_residual = (b - apply_vec(xv)).norm() / b_norm;
  if (st.relative_residual <= tol) st.converged = true;
  return {unvectorize(xv, op.rows, op.cols), st};
}

}  // namespace oja
