#include "oja/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace oja {

std::string format_full(Scalar value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string trace_csv(const NewtonResult& result) {
  std::string out =
      "iter,res_F,res_xi,orth_defect,norm_K,norm_XS,norm_XOmega,inner_iters,inner_res\n";
  for (const TraceRow& row : result.trace) {
    out += std::to_string(row.iter);
    out += ',';
    out += format_full(row.res_f);
    out += ',';
    out += format_full(row.res_xi);
    out += ',';
    out += format_full(row.orth_defect);
    out += ',';
    out += format_full(row.norm_k);
    out += ',';
    out += format_full(row.norm_xs);
    out += ',';
    out += format_full(row.norm_xomega);
    out += ',';
    out += std::to_string(row.inner_iterations);
    out += ',';
    out += format_full(row.inner_relative_residual);
    out += '\n';
  }
  return out;
}

std::string census_csv(const BasinResult& result) {
  std::string out = "label,count\n";
  for (std::size_t i = 0; i < result.labels.size(); ++i) {
    out += result.labels[i].to_string();
    out += ',';
    out += std::to_string(result.counts[i]);
    out += '\n';
  }
  out += "unclassified," + std::to_string(result.unclassified) + "\n";
  return out;
}

std::string convergence_trial_csv(const ConvergenceTrial& trial) {
  std::string out = "iter,residual,error\n";
  const std::size_t rows = std::max(trial.residuals.size(), trial.errors.size());
  for (std::size_t k = 0; k < rows; ++k) {
    out += std::to_string(k);
    out += ',';
    out += k < trial.residuals.size() ? format_full(trial.residuals[k]) : "";
    out += ',';
    out += k < trial.errors.size() ? format_full(trial.errors[k]) : "";
    out += '\n';
  }
  return out;
}

std::string convergence_fits_csv(const ConvergenceResult& result) {
  std::string out = "trial,converged,iterations,fitted_order,final_residual\n";
  for (std::size_t t = 0; t < result.trials.size(); ++t) {
    const ConvergenceTrial& trial = result.trials[t];
    out += std::to_string(t);
    out += ',';
    out += trial.converged ? "1" : "0";
    out += ',';
    out += std::to_string(trial.iterations);
    out += ',';
    out += format_full(trial.fitted_order);
    out += ',';
    out += trial.residuals.empty() ? "" : format_full(trial.residuals.back());
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("write_file: cannot open " + path);
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write_file: write failed for " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("read_file: cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

Matrix parse_matrix_body(std::istream& in, Index rows, Index cols, const char* who) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (!(in >> m(i, j))) {
        throw std::runtime_error(std::string(who) + ": too few entries or bad number");
      }
    }
  }
  return m;
}

}  // namespace

SpdMatrix load_spd_matrix(std::istream& in) {
  Index n = 0;
  if (!(in >> n) || n < 1) {
    throw std::runtime_error("load_spd_matrix: first line must be the dimension");
  }
  return SpdMatrix(parse_matrix_body(in, n, n, "load_spd_matrix"));
}

SpdMatrix load_spd_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_spd_matrix_file: cannot open " + path);
  }
  return load_spd_matrix(in);
}

std::string spd_matrix_text(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("spd_matrix_text: matrix must be square");
  }
  std::string out = std::to_string(a.rows()) + "\n";
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (j > 0) out += ' ';
      out += format_full(a(i, j));
    }
    out += '\n';
  }
  return out;
}

Matrix load_matrix(std::istream& in) {
  Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1) {
    throw std::runtime_error("load_matrix: first line must be 'rows cols'");
  }
  return parse_matrix_body(in, rows, cols, "load_matrix");
}

Matrix load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_matrix_file: cannot open " + path);
  }
  return load_matrix(in);
}

std::string matrix_text(const Matrix& m) {
  std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ' ';
      out += format_full(m(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace oja
