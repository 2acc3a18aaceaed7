#pragma once

#include <utility>

#include "oja/field.hpp"
#include "oja/types.hpp"

namespace oja {

/// Outcome of a Krylov solve.  relative_residual is the true (recomputed)
/// residual ||op(x) - rhs|| / ||rhs||, not the recurrence estimate.
struct KrylovStats {
  int iterations = 0;          // operator applications inside Arnoldi
  int restarts = 0;            // completed restart cycles
  Scalar relative_residual = 0;
  bool converged = false;
  bool stagnated = false;      // a restart cycle made (essentially) no progress
  bool breakdown = false;      // invariant subspace found (happy breakdown)
};

/// Restarted GMRES on the space of rows x cols matrices with the Frobenius
/// inner product, starting from the zero guess.
///
/// Stops when the relative residual drops to tol, when max_iterations
/// operator applications are spent (0 means rows*cols), or when a restart
/// cycle stalls; a stalled solve is reported via stagnated, never silently.
/// The Arnoldi basis is built by modified Gram-Schmidt with one
/// reorthogonalization pass, and the least-squares problem is updated with
/// Givens rotations.
std::pair<Matrix, KrylovStats> krylov_solve(const LinearOperator& op, const Matrix& rhs,
                                            Scalar tol, int restart = 30,
                                            int max_iterations = 0);

}  // namespace oja
