#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oja/linalg.hpp"
#include "oja/newton.hpp"
#include "oja/types.hpp"

namespace oja {

/// A p-element subset of {1, ..., n} naming the eigenvectors spanning an
/// invariant subspace.  Indices are 1-based and strictly increasing.
struct SubspaceLabel {
  std::vector<int> indices;

  /// "123" when every index is a single digit, "1-10-12" otherwise.
  std::string to_string() const;

  bool operator==(const SubspaceLabel& other) const = default;
};

/// All p-subsets of {1, ..., n} in lexicographic order.
std::vector<SubspaceLabel> enumerate_labels(Index n, Index p);

/// Attribute X to an invariant subspace by the column norms of X^T W, where
/// the columns of W are the eigenvectors of A: exactly p norms must exceed
/// the threshold and the remaining n-p must fall below it, otherwise the
/// point is unclassified (nullopt).
std::optional<SubspaceLabel> classify(const Matrix& x, const Matrix& eigenvectors,
                                      Scalar threshold);

/// Shared experiment configuration.  The per-experiment factory functions
/// below fill in the published defaults; callers typically override only
/// trials, seed, and threads.
///
/// Reproducibility contract: stream 0 of the seed draws any shared data
/// (the matrix A); trial t draws from its own stream(s) derived from t, so
/// results are independent of the thread schedule.
struct ExperimentSpec {
  Index n = 6;
  Index p = 3;
  std::uint64_t seed = 0;
  int trials = 1;
  int threads = 1;
  SolverConfig solver;
  Scalar classify_threshold = 1e-10;
  Scalar perturbation = 0;
};

/// 100 trials of the plain method with the dense backend, started from
/// 1e-6-perturbations of the dominant invariant basis.
ExperimentSpec degeneracy_spec();

/// 10000 trials of the geometric method from Gaussian starts on one matrix.
ExperimentSpec basin_spec();

/// 20 trials of the geometric method with a tight fixed inner tolerance,
/// started at class distance 1e-2 from the dominant invariant basis of a
/// fresh matrix per trial.
ExperimentSpec convergence_spec();

struct DegeneracyResult {
  Matrix a;       // the shared SPD matrix
  Matrix x_star;  // dominant invariant basis (first p eigenvectors)
  std::vector<NewtonResult> runs;
};

DegeneracyResult run_degeneracy_experiment(const ExperimentSpec& spec);

struct BasinTrial {
  int label_slot = -1;  // index into BasinResult::labels, -1 if unclassified
  RunStatus status = RunStatus::max_iters;
  int iterations = 0;
  Scalar final_res_xi = 0;
  Scalar final_orth_defect = 0;
  Matrix x_final;
};

struct BasinResult {
  Matrix a;
  SpectralDecomposition spectrum;
  std::vector<SubspaceLabel> labels;  // lexicographic order
  std::vector<long> counts;           // aligned with labels
  long unclassified = 0;
  long total = 0;
  std::vector<BasinTrial> trials;
};

BasinResult run_basin_experiment(const ExperimentSpec& spec);

struct ConvergenceTrial {
  bool converged = false;
  int iterations = 0;
  std::vector<Scalar> residuals;  // ||xi_lift|| at X_0 .. X_final
  std::vector<Scalar> errors;     // class_distance(X_k, X_final)
  Scalar fitted_order = 0;
  Scalar fitted_log_c = 0;
  Scalar final_orth_defect = 0;
};

struct ConvergenceResult {
  std::vector<ConvergenceTrial> trials;
};

ConvergenceResult run_convergence_experiment(const ExperimentSpec& spec);

/// Least-squares fit of log e_{k+1} = order * log e_k + log_c over the last
/// pairs of consecutive errors that both lie inside [floor, cap].  At most
/// max_pairs pairs are used; fewer than two resolvable pairs yields NaN.
struct OrderFit {
  Scalar order;
  Scalar log_c;
  int pairs = 0;
};

OrderFit estimate_convergence_order(const std::vector<Scalar>& errors,
                                    Scalar floor = 1e-13, Scalar cap = 0.5,
                                    int max_pairs = 3);

}  // namespace oja
