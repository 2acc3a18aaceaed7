#pragma once

#include <utility>
#include <vector>

#include "oja/field.hpp"
#include "oja/krylov.hpp"
#include "oja/types.hpp"

namespace oja {

enum class NewtonMethod { plain, geometric };
enum class InnerSolver { dense, krylov };
enum class ForcingPolicy { fixed, adaptive };

/// Relative tolerance handed to the inner linear solver at a given outer
/// residual norm.  The fixed policy returns fixed_eta unconditionally; the
/// adaptive policy returns min(0.5, sqrt(residual_norm)) clamped below at
/// 1e-14.  The iteration index is accepted for interface stability; current
/// policies do not depend on it.
Scalar forcing_term(int iteration, Scalar residual_norm, ForcingPolicy policy,
                    Scalar fixed_eta = 1e-12);

struct SolverConfig {
  int max_outer_iters = 50;
  Scalar residual_tol = 1e-14;
  InnerSolver inner_solver = InnerSolver::krylov;
  ForcingPolicy forcing = ForcingPolicy::adaptive;
  Scalar fixed_forcing = 1e-12;   // inner tolerance under the fixed policy
  int krylov_restart = 30;
  int krylov_max_iterations = 0;  // 0 means n*p
  Scalar rank_rtol = 1e-12;       // relative rank guard applied to iterates
  bool keep_iterates = false;     // record X_0 .. X_final in the result

  void validate() const;  // throws std::invalid_argument on nonsense values
};

/// Diagnostics for a single Newton step's inner solve.
struct StepStats {
  int inner_iterations = 0;          // Krylov iterations (0 for dense solves)
  Scalar inner_relative_residual = 0;
  Scalar condition_number = 0;       // dense backend only
  bool rank_deficient = false;       // dense backend found a numerically singular system
  bool stagnated = false;            // Krylov backend stalled
  bool failed = false;               // no usable step was produced
};

/// One plain Newton step: solve DF(X)[Z] = -F(X) for Z in the full space.
/// A numerically singular dense system falls back to the minimum-norm
/// least-squares solution and flags rank_deficient rather than failing.
std::pair<Matrix, StepStats> plain_newton_step(const OjaProblem& prob, const Iterate& x,
                                               const SolverConfig& cfg);

/// One geometric Newton step on the quotient: solve the augmented system
///   Phor(D(xi_lift)(X)[Phor Zhat]) + Pskew Zhat = -xi_lift(X)
/// in the full space and return Z = Phor(Zhat), which solves the horizontal
/// Newton equation.  A singular system marks the step failed.
std::pair<Matrix, StepStats> geometric_newton_step(const OjaProblem& prob, const Iterate& x,
                                                   const SolverConfig& cfg);

enum class RunStatus { converged, max_iters, singular_system, rank_lost };

const char* to_string(RunStatus status);

/// Per-iteration record: residuals and the component split of the step taken
/// from this iterate.  norm_k is the part of the step leaving span(X),
/// norm_xs the symmetric in-span part, norm_xomega the vertical part.
struct TraceRow {
  int iter = 0;
  Scalar res_f = 0;
  Scalar res_xi = 0;
  Scalar orth_defect = 0;
  Scalar norm_k = 0;
  Scalar norm_xs = 0;
  Scalar norm_xomega = 0;
  int inner_iterations = 0;
  Scalar inner_relative_residual = 0;
  bool inner_rank_deficient = false;
};

struct NewtonResult {
  Matrix x_final;
  std::vector<TraceRow> trace;  // one row per executed step
  RunStatus status = RunStatus::max_iters;
  int iterations = 0;           // number of executed steps
  Scalar final_res_f = 0;
  Scalar final_res_xi = 0;
  Scalar final_orth_defect = 0;
  std::vector<Matrix> iterates;  // X_0 .. X_final when cfg.keep_iterates
};

/// Run Newton's method from x0 with the update X <- X + Z.
///
/// The convergence residual is ||F|| for the plain method and ||xi_lift||
/// for the geometric one, checked before each step, so a converged start
/// yields an empty trace.  Steps whose inner solve fails abort with
/// singular_system; an update that would lose numerical rank aborts with
/// rank_lost and keeps the last full-rank iterate.
NewtonResult run_newton(const OjaProblem& prob, const Matrix& x0, NewtonMethod method,
                        const SolverConfig& cfg);

}  // namespace oja
