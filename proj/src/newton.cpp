#include "oja/newton.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace oja {
namespace {

// Threshold below which a singular value (relative to the largest) makes the
// dense backend report the system as numerically rank deficient.  This is a
// diagnosis only: the solve itself still divides by every nonzero singular
// value, exactly as a direct factorization would.  Truncating at the warning
// threshold instead would silently regularize near-singular systems and hide
// the step blow-up that callers asked to observe.
constexpr Scalar kDenseRankTol = 1e-14;

struct DenseSolve {
  Vector x;
  Scalar condition = 0;
  Scalar relative_residual = 0;
  bool rank_deficient = false;
};

DenseSolve dense_solve(const Matrix& m, const Vector& b) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const Scalar s_max = sv(0);
  const Scalar s_min = sv(sv.size() - 1);

  DenseSolve out;
  out.rank_deficient = !(s_min > kDenseRankTol * s_max);
  out.condition = s_min > 0 ? s_max / s_min : std::numeric_limits<Scalar>::infinity();
  // Invert every singular value that is nonzero at working precision; only an
  // exact zero is dropped, which keeps the least-squares solution finite for
  // exactly singular inputs without regularizing merely ill-conditioned ones.
  svd.setThreshold(std::numeric_limits<Scalar>::denorm_min());
  out.x = svd.solve(b);
  const Scalar b_norm = b.norm();
  out.relative_residual = b_norm > 0 ? (m * out.x - b).norm() / b_norm : 0;
  return out;
}

std::pair<Matrix, StepStats> solve_step(const LinearOperator& op, const Matrix& rhs,
                                        const SolverConfig& cfg, bool least_squares_ok) {
  StepStats st;
  Matrix z;
  if (cfg.inner_solver == InnerSolver::dense) {
    const DenseSolve ds = dense_solve(dense_operator_matrix(op), vectorize(rhs));
    z = unvectorize(ds.x, op.rows, op.cols);
    st.condition_number = ds.condition;
    st.inner_relative_residual = ds.relative_residual;
    st.rank_deficient = ds.rank_deficient;
    if (ds.rank_deficient && !least_squares_ok) st.failed = true;
  } else {
    const Scalar eta = forcing_term(0, rhs.norm(), cfg.forcing, cfg.fixed_forcing);
    auto [zk, ks] = krylov_solve(op, rhs, eta, cfg.krylov_restart, cfg.krylov_max_iterations);
    z = std::move(zk);
    st.inner_iterations = ks.iterations;
    st.inner_relative_residual = ks.relative_residual;
    st.stagnated = ks.stagnated;
    // A stall after meaningful progress still yields a usable inexact step;
    // only a solve that went nowhere is treated as a singular system.
    if (ks.stagnated && !ks.converged && ks.relative_residual > Scalar(0.5)) st.failed = true;
  }
  if (!z.allFinite()) st.failed = true;
  return {std::move(z), st};
}

}  // namespace

Scalar forcing_term(int /*iteration*/, Scalar residual_norm, ForcingPolicy policy,
                    Scalar fixed_eta) {
  if (!(residual_norm >= 0)) {
    throw std::invalid_argument("forcing_term: residual norm must be nonnegative");
  }
  if (policy == ForcingPolicy::fixed) {
    if (!(fixed_eta > 0)) {
      throw std::invalid_argument("forcing_term: fixed forcing must be positive");
    }
    return fixed_eta;
  }
  return std::max(Scalar(1e-14), std::min(Scalar(0.5), std::sqrt(residual_norm)));
}

void SolverConfig::validate() const {
  if (max_outer_iters < 0) {
    throw std::invalid_argument("SolverConfig: max_outer_iters must be nonnegative");
  }
  if (!(residual_tol > 0)) {
    throw std::invalid_argument("SolverConfig: residual_tol must be positive");
  }
  if (!(fixed_forcing > 0)) {
    throw std::invalid_argument("SolverConfig: fixed_forcing must be positive");
  }
  if (krylov_restart < 1) {
    throw std::invalid_argument("SolverConfig: krylov_restart must be positive");
  }
  if (krylov_max_iterations < 0) {
    throw std::invalid_argument("SolverConfig: krylov_max_iterations must be nonnegative");
  }
  if (!(rank_rtol > 0 && rank_rtol < 1)) {
    throw std::invalid_argument("SolverConfig: rank_rtol must lie in (0, 1)");
  }
}

std::pair<Matrix, StepStats> plain_newton_step(const OjaProblem& prob, const Iterate& x,
                                               const SolverConfig& cfg) {
  const Matrix rhs = -oja_f(prob, x);
  return solve_step(plain_jacobian_operator(prob, x), rhs, cfg,
                    /*least_squares_ok=*/true);
}

std::pair<Matrix, StepStats> geometric_newton_step(const OjaProblem& prob, const Iterate& x,
                                                   const SolverConfig& cfg) {
  const Matrix rhs = -xi_lift(prob, x);
  auto [z_hat, st] = solve_step(augmented_newton_operator(prob, x), rhs, cfg,
                                /*least_squares_ok=*/false);
  if (st.failed) return {std::move(z_hat), st};
  // The augmented solution is horizontal up to the inner tolerance; project
  // away the residual vertical part so the retraction stays on the fiber.
  return {project_horizontal(x, z_hat), st};
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_iters: return "max_iters";
    case RunStatus::singular_system: return "singular_system";
    case RunStatus::rank_lost: return "rank_lost";
  }
  return "unknown";
}

NewtonResult run_newton(const OjaProblem& prob, const Matrix& x0, NewtonMethod method,
                        const SolverConfig& cfg) {
  cfg.validate();
  Iterate x(x0, cfg.rank_rtol);

  NewtonResult out;
  if (cfg.keep_iterates) out.iterates.push_back(x.x());

  for (int k = 0;; ++k) {
    const Scalar res_f = oja_f(prob, x).norm();
    const Scalar res_xi = xi_lift(prob, x).norm();
    const Scalar orth =
        (x.gram() - Matrix::Identity(x.cols(), x.cols())).norm();
    out.final_res_f = res_f;
    out.final_res_xi = res_xi;
    out.final_orth_defect = orth;

    const Scalar residual = method == NewtonMethod::plain ? res_f : res_xi;
    if (residual <= cfg.residual_tol) {
      out.status = RunStatus::converged;
      break;
    }
    if (k >= cfg.max_outer_iters) {
      out.status = RunStatus::max_iters;
      break;
    }

    auto [z, st] = method == NewtonMethod::plain ? plain_newton_step(prob, x, cfg)
                                                 : geometric_newton_step(prob, x, cfg);
    if (st.failed) {
      out.status = RunStatus::singular_system;
      break;
    }

    TraceRow row;
    row.iter = k;
    row.res_f = res_f;
    row.res_xi = res_xi;
    row.orth_defect = orth;
    row.norm_k = project_perp(x, z).norm();
    row.norm_xs = project_sym(x, z).norm();
    row.norm_xomega = project_skew(x, z).norm();
    row.inner_iterations = st.inner_iterations;
    row.inner_relative_residual = st.inner_relative_residual;
    row.inner_rank_deficient = st.rank_deficient;
    out.trace.push_back(row);

    // The constructor enforces the rank guard and a positive-definite Gram
    // factorization; an update that passes the singular-value guard can still
    // be too ill-conditioned to factor, and both cases end the run the same
    // way: the iterate no longer has usable rank at working precision.
    try {
      x = Iterate(x.x() + z, cfg.rank_rtol);
    } catch (const std::invalid_argument&) {
      out.status = RunStatus::rank_lost;
      break;
    }
    if (cfg.keep_iterates) out.iterates.push_back(x.x());
  }

  out.x_final = x.x();
  out.iterations = static_cast<int>(out.trace.size());
  return out;
}

}  // namespace oja
