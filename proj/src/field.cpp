#include "oja/field.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <vector>

namespace oja {
namespace {

void check_problem_shape(const OjaProblem& prob, const Iterate& x, const char* who) {
  if (x.rows() != prob.n() || x.cols() != prob.p) {
    throw std::invalid_argument(std::string(who) + ": iterate shape does not match problem");
  }
}

// Orthonormal (Frobenius) basis of p x p symmetric matrices.
std::vector<Matrix> symmetric_basis(Index p) {
  std::vector<Matrix> basis;
  const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
  for (Index i = 0; i < p; ++i) {
    Matrix e = Matrix::Zero(p, p);
    e(i, i) = 1;
    basis.push_back(e);
  }
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      Matrix e = Matrix::Zero(p, p);
      e(i, j) = inv_sqrt2;
      e(j, i) = inv_sqrt2;
      basis.push_back(e);
    }
  }
  return basis;
}

// Orthonormal (Frobenius) basis of p x p skew-symmetric matrices.
std::vector<Matrix> skew_basis(Index p) {
  std::vector<Matrix> basis;
  const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      Matrix e = Matrix::Zero(p, p);
      e(i, j) = inv_sqrt2;
      e(j, i) = -inv_sqrt2;
      basis.push_back(e);
    }
  }
  return basis;
}

// Orthonormal basis (as dense columns) of the range of a projector matrix
// whose singular values cluster at 0 and 1.
Matrix projector_range_basis(const Matrix& projector) {
  Eigen::JacobiSVD<Matrix> svd(projector, Eigen::ComputeThinU);
  Index rank = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > Scalar(0.5)) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

}  // namespace

Matrix oja_f(const OjaProblem& prob, const Iterate& x) {
  check_problem_shape(prob, x, "oja_f");
  const Matrix ax = prob.a.matrix() * x.x();
  return ax - x.x() * (x.x().transpose() * ax);
}

Matrix oja_df(const OjaProblem& prob, const Iterate& x, const Matrix& z) {
  check_problem_shape(prob, x, "oja_df");
  if (z.rows() != x.rows() || z.cols() != x.cols()) {
    throw std::invalid_argument("oja_df: direction shape must match the iterate");
  }
  const Matrix& xm = x.x();
  const Matrix ax = prob.a.matrix() * xm;
  const Matrix az = prob.a.matrix() * z;
  return az - z * (xm.transpose() * ax) - xm * (z.transpose() * ax) -
         xm * (xm.transpose() * az);
}

Matrix xi_lift(const OjaProblem& prob, const Iterate& x) {
  check_problem_shape(prob, x, "xi_lift");
  const Matrix& xm = x.x();
  const Matrix ax = prob.a.matrix() * xm;
  const Matrix xtax = xm.transpose() * ax;
  return ax - xm * xtax - xm * skew(x.gram_solve(xtax));
}

Matrix xi_dlift(const OjaProblem& prob, const Iterate& x, const Matrix& z) {
  check_problem_shape(prob, x, "xi_dlift");
  if (z.rows() != x.rows() || z.cols() != x.cols()) {
    throw std::invalid_argument("xi_dlift: direction shape must match the iterate");
  }
  const Matrix& xm = x.x();
  const Matrix ax = prob.a.matrix() * xm;
  const Matrix az = prob.a.matrix() * z;
  const Matrix xtax = xm.transpose() * ax;
  const Matrix ztax = z.transpose() * ax;
  const Matrix xtaz = xm.transpose() * az;

  const Matrix df = az - z * xtax - xm * ztax - xm * xtaz;

  // Derivative of the correction term X skew(G^{-1} X^T A X), G = X^T X.
  const Matrix c = x.gram_solve(xtax);  // G^{-1} X^T A X
  const Matrix xtz = xm.transpose() * z;
  const Matrix dgram = xtz + xtz.transpose();  // X^T Z + Z^T X
  const Matrix inner = -x.gram_solve(dgram * c) + x.gram_solve(ztax + xtaz);

  return df - z * skew(c) - xm * skew(inner);
}

LinearOperator plain_jacobian_operator(const OjaProblem& prob, const Iterate& x) {
  check_problem_shape(prob, x, "plain_jacobian_operator");
  LinearOperator op;
  op.rows = x.rows();
  op.cols = x.cols();
  op.domain = OperatorSpace::full;
  op.codomain = OperatorSpace::full;
  op.apply = [prob, x](const Matrix& z) { return oja_df(prob, x, z); };
  return op;
}

LinearOperator lift_jacobian_operator(const OjaProblem& prob, const Iterate& x) {
  check_problem_shape(prob, x, "lift_jacobian_operator");
  LinearOperator op;
  op.rows = x.rows();
  op.cols = x.cols();
  op.domain = OperatorSpace::full;
  op.codomain = OperatorSpace::full;
  op.apply = [prob, x](const Matrix& z) { return xi_dlift(prob, x, z); };
  return op;
}

LinearOperator newton_operator(const OjaProblem& prob, const Iterate& x) {
  check_problem_shape(prob, x, "newton_operator");
  LinearOperator op;
  op.rows = x.rows();
  op.cols = x.cols();
  op.domain = OperatorSpace::horizontal;
  op.codomain = OperatorSpace::horizontal;
  op.apply = [prob, x](const Matrix& z) {
    return project_horizontal(x, xi_dlift(prob, x, z));
  };
  return op;
}

LinearOperator augmented_newton_operator(const OjaProblem& prob, const Iterate& x) {
  check_problem_shape(prob, x, "augmented_newton_operator");
  LinearOperator op;
  op.rows = x.rows();
  op.cols = x.cols();
  op.domain = OperatorSpace::full;
  op.codomain = OperatorSpace::full;
  op.apply = [prob, x](const Matrix& z) -> Matrix {
    const Matrix zh = project_horizontal(x, z);
    // Explicit return type: the sum below must be materialized before the
    // locals it references go out of scope.
    return project_horizontal(x, xi_dlift(prob, x, zh)) + project_skew(x, z);
  };
  return op;
}

Matrix dense_operator_matrix(const LinearOperator& op) {
  if (!op.apply || op.rows < 1 || op.cols < 1) {
    throw std::invalid_argument("dense_operator_matrix: operator is empty");
  }
  const Index dim = op.rows * op.cols;
  Matrix m(dim, dim);
  Matrix e = Matrix::Zero(op.rows, op.cols);
  for (Index k = 0; k < dim; ++k) {
    e(k % op.rows, k / op.rows) = 1;
    m.col(k) = vectorize(op.apply(e));
    e(k % op.rows, k / op.rows) = 0;
  }
  return m;
}

ZeroReport verify_zero(const OjaProblem& prob, const Iterate& x, Scalar tol) {
  check_problem_shape(prob, x, "verify_zero");
  ZeroReport rep;
  rep.f_norm = oja_f(prob, x).norm();
  rep.xi_norm = xi_lift(prob, x).norm();
  rep.invariant_subspace_defect = project_perp(x, prob.a.matrix() * x.x()).norm();
  rep.orthonormality_defect =
      (x.gram() - Matrix::Identity(x.cols(), x.cols())).norm();
  rep.is_zero_f = rep.f_norm <= tol;
  rep.is_zero_xi = rep.xi_norm <= tol;
  return rep;
}

NondegeneracyReport nondegeneracy_check(const OjaProblem& prob, const Iterate& x_star,
                                        Scalar input_tol) {
  check_problem_shape(prob, x_star, "nondegeneracy_check");
  const Scalar a_norm = prob.a.matrix().norm();
  if (oja_f(prob, x_star).norm() > input_tol * a_norm) {
    throw std::invalid_argument("nondegeneracy_check: x_star is not a zero of the field");
  }

  const Index p = x_star.cols();
  NondegeneracyReport rep;

  const LinearOperator lift_jac = lift_jacobian_operator(prob, x_star);
  const Matrix j_full = dense_operator_matrix(lift_jac);

  // Kernel dimension of the plain Jacobian DF: singular values at the level
  // of roundoff count as zero.
  {
    const Matrix df = dense_operator_matrix(plain_jacobian_operator(prob, x_star));
    Eigen::JacobiSVD<Matrix> svd(df);
    const Scalar smax = svd.singularValues()(0);
    for (Index i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()(i) <= Scalar(1e-8) * smax) ++rep.full_kernel_dim;
    }
  }

  // Restriction to the horizontal space in an orthonormal basis of it.
  {
    LinearOperator hor;
    hor.rows = x_star.rows();
    hor.cols = x_star.cols();
    hor.apply = [&x_star](const Matrix& z) { return project_horizontal(x_star, z); };
    const Matrix basis = projector_range_basis(dense_operator_matrix(hor));
    const Matrix restricted = basis.transpose() * j_full * basis;
    Eigen::JacobiSVD<Matrix> svd(restricted);
    rep.sigma_min_horizontal = svd.singularValues()(svd.singularValues().size() - 1);
  }

  // Perp-perp diagonal block.
  {
    LinearOperator perp;
    perp.rows = x_star.rows();
    perp.cols = x_star.cols();
    perp.apply = [&x_star](const Matrix& z) { return project_perp(x_star, z); };
    const Matrix basis = projector_range_basis(dense_operator_matrix(perp));
    const Matrix restricted = basis.transpose() * j_full * basis;
    Eigen::JacobiSVD<Matrix> svd(restricted);
    rep.pp_block_sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
  }

  // Sym-sym diagonal block in the orthonormal symmetric basis.  The block is
  // the negated Sylvester map S -> S B + B S with B = X^T A X; report the
  // Sylvester spectrum (negated block) for direct comparison with
  // {beta_i + beta_j}.
  const Matrix b = sym(x_star.x().transpose() * (prob.a.matrix() * x_star.x()));
  rep.beta = jacobi_eigen(b).values;
  {
    const std::vector<Matrix> sbasis = symmetric_basis(p);
    const Index m = static_cast<Index>(sbasis.size());
    Matrix block(m, m);
    Scalar perp_defect = 0;
    for (Index k = 0; k < m; ++k) {
      const Matrix y = lift_jac.apply(x_star.x() * sbasis[static_cast<std::size_t>(k)]);
      perp_defect = std::max(perp_defect, project_perp(x_star, y).norm());
      const Matrix s_out = sym(x_star.x().transpose() * y);
      for (Index l = 0; l < m; ++l) {
        block(l, k) = (sbasis[static_cast<std::size_t>(l)].array() * s_out.array()).sum();
      }
    }
    rep.sylvester_eigenvalues = jacobi_eigen(sym(-block)).values;
    rep.zero_block_defect = perp_defect / a_norm;
  }

  // The skew column of the lifted Jacobian must vanish identically.
  {
    Scalar skew_defect = 0;
    for (const Matrix& w : skew_basis(p)) {
      skew_defect = std::max(skew_defect, lift_jac.apply(x_star.x() * w).norm());
    }
    rep.zero_block_defect = std::max(rep.zero_block_defect, skew_defect / a_norm);
  }

  const Scalar sylvester_min =
      rep.sylvester_eigenvalues.size() > 0
          ? rep.sylvester_eigenvalues(rep.sylvester_eigenvalues.size() - 1)
          : std::numeric_limits<Scalar>::infinity();
  rep.block_structure_ok = rep.zero_block_defect <= Scalar(1e-10) &&
                           rep.pp_block_sigma_min > Scalar(1e-8) * a_norm &&
                           sylvester_min > Scalar(1e-8) * a_norm;
  return rep;
}

}  // namespace oja
