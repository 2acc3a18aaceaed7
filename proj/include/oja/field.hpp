#pragma once

#include <functional>

#include "oja/geometry.hpp"
#include "oja/linalg.hpp"
#include "oja/types.hpp"

namespace oja {

/// Problem data: an SPD matrix A together with the number of columns p of the
/// iterates (0 < p < n).
struct OjaProblem {
  SpdMatrix a;
  Index p;

  OjaProblem(SpdMatrix a_in, Index p_in) : a(std::move(a_in)), p(p_in) {
    if (p < 1 || p >= a.dim()) {
      throw std::invalid_argument("OjaProblem: require 0 < p < n");
    }
  }

  Index n() const { return a.dim(); }
};

/// Whether a linear operator acts on (or produces) arbitrary n x p matrices
/// or only horizontal ones.  Purely descriptive; callers use it to check
/// they are composing operators on compatible spaces.
enum class OperatorSpace { full, horizontal };

/// A linear map between spaces of n x p matrices, given by its action.
struct LinearOperator {
  Index rows = 0;
  Index cols = 0;
  OperatorSpace domain = OperatorSpace::full;
  OperatorSpace codomain = OperatorSpace::full;
  std::function<Matrix(const Matrix&)> apply;
};

/// The field F(X) = A X - X X^T A X.
Matrix oja_f(const OjaProblem& prob, const Iterate& x);

/// Directional derivative of F at X along Z:
///   A Z - Z X^T A X - X Z^T A X - X X^T A Z.
Matrix oja_df(const OjaProblem& prob, const Iterate& x, const Matrix& z);

/// Horizontal lift of the induced field on the quotient:
///   A X - X X^T A X - X skew((X^T X)^{-1} X^T A X).
Matrix xi_lift(const OjaProblem& prob, const Iterate& x);

/// Directional derivative of the horizontal lift at X along Z (without any
/// outer projection).
Matrix xi_dlift(const OjaProblem& prob, const Iterate& x, const Matrix& z);

/// Z -> DF(X)[Z], the full-space Jacobian used by the plain Newton method.
LinearOperator plain_jacobian_operator(const OjaProblem& prob, const Iterate& x);

/// Z -> D(xi_lift)(X)[Z] without outer projection.
LinearOperator lift_jacobian_operator(const OjaProblem& prob, const Iterate& x);

/// Z -> Phor(D(xi_lift)(X)[Z]): the covariant derivative of the quotient
/// Newton equation, mapping horizontal Z to horizontal values.
LinearOperator newton_operator(const OjaProblem& prob, const Iterate& x);

/// Full-space augmentation of newton_operator whose unique solution for a
/// horizontal right-hand side is automatically horizontal:
///   Z -> Phor(D(xi_lift)(X)[Phor Z]) + Pskew Z.
LinearOperator augmented_newton_operator(const OjaProblem& prob, const Iterate& x);

/// Materialize a LinearOperator as its (rows*cols) x (rows*cols) matrix in
/// the column-major basis, by applying it to every unit basis matrix.
Matrix dense_operator_matrix(const LinearOperator& op);

/// Diagnostics describing how close X is to a zero of the field.
struct ZeroReport {
  Scalar f_norm = 0;                    // ||F(X)||_F
  Scalar xi_norm = 0;                   // ||xi_lift(X)||_F
  Scalar invariant_subspace_defect = 0; // ||Pperp(A X)||_F
  Scalar orthonormality_defect = 0;     // ||X^T X - I||_F
  bool is_zero_f = false;
  bool is_zero_xi = false;
};

ZeroReport verify_zero(const OjaProblem& prob, const Iterate& x, Scalar tol = 1e-12);

/// Structure report for the lifted Jacobian at a zero x_star.
///
/// In the decomposition (perp, sym, skew) of the tangent space the lifted
/// Jacobian is block lower triangular with a zero third column; the diagonal
/// blocks decide degeneracy.  The sym-sym diagonal block is the negated
/// Sylvester map S -> S B + B S with B = X^T A X, so its spectrum is
/// {-(beta_i + beta_j)}; we report the spectrum of the Sylvester map itself
/// (descending), which should match {beta_i + beta_j}.
struct NondegeneracyReport {
  Scalar sigma_min_horizontal = 0;  // smallest singular value of the operator
                                    // restricted to the horizontal space
  Index full_kernel_dim = 0;        // kernel dimension of the plain Jacobian DF
  Scalar pp_block_sigma_min = 0;    // smallest singular value of the perp-perp block
  Vector sylvester_eigenvalues;     // spectrum of S -> S B + B S, descending
  Vector beta;                      // eigenvalues of B = X^T A X, descending
  Scalar zero_block_defect = 0;     // largest relative residual of the blocks
                                    // that must vanish identically
  bool block_structure_ok = false;
};

/// Analyze the Jacobian structure at a zero.  Throws std::invalid_argument if
/// x_star is not a zero of the field to within input_tol * ||A||_F.
NondegeneracyReport nondegeneracy_check(const OjaProblem& prob, const Iterate& x_star,
                                        Scalar input_tol = 1e-8);

}  // namespace oja
