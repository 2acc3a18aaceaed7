#pragma once

#include <iosfwd>
#include <string>

#include "oja/experiments.hpp"
#include "oja/linalg.hpp"
#include "oja/newton.hpp"
#include "oja/types.hpp"

namespace oja {

/// Shortest round-trip decimal text for a double (17 significant digits).
/// All file output goes through this, which is what makes reruns
/// byte-identical.
std::string format_full(Scalar value);

/// Per-iteration trace of a Newton run.
/// Columns: iter,res_F,res_xi,orth_defect,norm_K,norm_XS,norm_XOmega,inner_iters,inner_res
std::string trace_csv(const NewtonResult& result);

/// Census of a basin experiment: one row per label in lexicographic order
/// followed by the unclassified row.  Columns: label,count
std::string census_csv(const BasinResult& result);

/// Residual/error sequence of one convergence trial.
/// Columns: iter,residual,error
std::string convergence_trial_csv(const ConvergenceTrial& trial);

/// Fitted convergence order per trial.
/// Columns: trial,converged,iterations,fitted_order,final_residual
std::string convergence_fits_csv(const ConvergenceResult& result);

/// Write content to path, creating parent directories; throws
/// std::runtime_error when the file cannot be written.
void write_file(const std::string& path, const std::string& content);

/// Read a whole file; throws std::runtime_error when it cannot be read.
std::string read_file(const std::string& path);

/// Symmetric-matrix file format: first line the dimension n, then n lines of
/// n space-separated decimal entries.  Loading symmetrizes the entries and
/// validates the SPD/simple-spectrum contract (std::invalid_argument on
/// violation); parse failures raise std::runtime_error.  The symmetry defect
/// of the raw entries is available from SpdMatrix::symmetry_defect.
SpdMatrix load_spd_matrix(std::istream& in);
SpdMatrix load_spd_matrix_file(const std::string& path);
std::string spd_matrix_text(const Matrix& a);

/// Rectangular matrix file format used for start points: first line
/// "rows cols", then the rows.  Same error contract as above.
Matrix load_matrix(std::istream& in);
Matrix load_matrix_file(const std::string& path);
std::string matrix_text(const Matrix& m);

}  // namespace oja
