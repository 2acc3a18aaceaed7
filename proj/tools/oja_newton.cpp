// Command-line front end: single Newton solves and the three experiment
// suites, with all results emitted as plain-text artifacts (CSV datasets,
// JSON summary/manifest) whose numeric fields are full round-trip decimals.
//
// Exit codes: 0 success (solve: converged), 1 solver failure, 2 invalid
// flags, 3 unreadable or invalid matrix/start files.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oja/experiments.hpp"
#include "oja/field.hpp"
#include "oja/io.hpp"
#include "oja/newton.hpp"

namespace {

using nlohmann::json;
using namespace oja;

constexpr const char* kArtifactVersion = "1.0.0";

constexpr int kExitSuccess = 0;
constexpr int kExitSolverFailure = 1;
constexpr int kExitBadFlags = 2;
constexpr int kExitBadInputFile = 3;

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string trial_file_name(const char* stem, int t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03d.csv", stem, t);
  return buf;
}

const char* to_string(NewtonMethod method) {
  return method == NewtonMethod::plain ? "plain" : "geometric";
}

const char* to_string(InnerSolver solver) {
  return solver == InnerSolver::dense ? "dense" : "krylov";
}

json solver_config_json(const SolverConfig& cfg) {
  return json{{"max_outer_iters", cfg.max_outer_iters},
              {"residual_tol", cfg.residual_tol},
              {"inner_solver", to_string(cfg.inner_solver)},
              {"forcing", cfg.forcing == ForcingPolicy::fixed ? "fixed" : "adaptive"},
              {"fixed_forcing", cfg.fixed_forcing},
              {"krylov_restart", cfg.krylov_restart},
              {"krylov_max_iterations", cfg.krylov_max_iterations},
              {"rank_rtol", cfg.rank_rtol}};
}

void write_manifest(const std::string& dir, const json& config,
                    const std::vector<std::string>& outputs) {
  json manifest;
  manifest["artifact_version"] = kArtifactVersion;
  manifest["config"] = config;
  manifest["outputs"] = outputs;
  write_file(join_path(dir, "manifest.json"), manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// solve

struct SolveOptions {
  Index n = 6;
  Index p = 3;
  std::uint64_t seed = 0;
  NewtonMethod method = NewtonMethod::geometric;
  SolverConfig cfg;
  std::string matrix_file;
  std::string x0_file;
  std::string out_dir = "solve_out";
};

int cmd_solve(const SolveOptions& opt) {
  // Problem setup; input files dominate the synthetic defaults.
  std::optional<SpdMatrix> a;
  try {
    if (!opt.matrix_file.empty()) {
      a.emplace(load_spd_matrix_file(opt.matrix_file));
    } else {
      RngStream setup(opt.seed, 0);
      a.emplace(random_spd_uniform(opt.n, setup));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: invalid matrix: %s\n", e.what());
    return kExitBadInputFile;
  }
  const Index n = a->matrix().rows();
  if (opt.p < 1 || opt.p >= n) {
    std::fprintf(stderr, "error: require 0 < p < n (p=%lld, n=%lld)\n",
                 static_cast<long long>(opt.p), static_cast<long long>(n));
    return kExitBadFlags;
  }
  const OjaProblem prob(*a, opt.p);

  Matrix x0;
  if (!opt.x0_file.empty()) {
    try {
      x0 = load_matrix_file(opt.x0_file);
      if (x0.rows() != n || x0.cols() != opt.p) {
        throw std::runtime_error("start point must be " + std::to_string(n) + " x " +
                                 std::to_string(opt.p));
      }
      if (!Iterate::full_rank(x0, opt.cfg.rank_rtol)) {
        throw std::runtime_error("start point is numerically rank deficient");
      }
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: invalid start point: %s\n", e.what());
      return kExitBadInputFile;
    }
  } else {
    RngStream rng(opt.seed, 1);
    x0 = random_gaussian(n, opt.p, rng);
    while (!Iterate::full_rank(x0, opt.cfg.rank_rtol)) {
      x0 = random_gaussian(n, opt.p, rng);
    }
  }

  NewtonResult result;
  try {
    result = run_newton(prob, x0, opt.method, opt.cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: solver failed: %s\n", e.what());
    return kExitSolverFailure;
  }

  json summary;
  summary["status"] = to_string(result.status);
  summary["converged"] = result.status == RunStatus::converged;
  summary["iterations"] = result.iterations;
  summary["final_res_F"] = result.final_res_f;
  summary["final_res_xi"] = result.final_res_xi;
  summary["final_orth_defect"] = result.final_orth_defect;

  json config;
  config["subcommand"] = "solve";
  config["n"] = n;
  config["p"] = opt.p;
  config["seed"] = opt.seed;
  config["method"] = to_string(opt.method);
  config["matrix_file"] = opt.matrix_file;
  config["x0_file"] = opt.x0_file;
  config["out"] = opt.out_dir;
  config["solver"] = solver_config_json(opt.cfg);

  write_file(join_path(opt.out_dir, "trace.csv"), trace_csv(result));
  write_file(join_path(opt.out_dir, "summary.json"), summary.dump(2) + "\n");
  write_file(join_path(opt.out_dir, "x_final.txt"), matrix_text(result.x_final));
  write_manifest(opt.out_dir, config,
                 {"trace.csv", "summary.json", "x_final.txt", "manifest.json"});

  std::printf("%s after %d iterations; final residual %s\n", to_string(result.status),
              result.iterations,
              format_full(opt.method == NewtonMethod::plain ? result.final_res_f
                                                            : result.final_res_xi)
                  .c_str());
  return result.status == RunStatus::converged ? kExitSuccess : kExitSolverFailure;
}

// ---------------------------------------------------------------------------
// experiment

enum class Which { degeneracy, basins, convergence };

struct ExperimentOptions {
  Which which = Which::degeneracy;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out_dir = "experiment_out";
};

json experiment_config_json(const char* which, const ExperimentSpec& spec,
                            const std::string& out_dir) {
  json config;
  config["subcommand"] = "experiment";
  config["which"] = which;
  config["n"] = spec.n;
  config["p"] = spec.p;
  config["seed"] = spec.seed;
  config["trials"] = spec.trials;
  config["threads"] = spec.threads;
  config["classify_threshold"] = spec.classify_threshold;
  config["perturbation"] = spec.perturbation;
  config["out_dir"] = out_dir;
  config["solver"] = solver_config_json(spec.solver);
  return config;
}

int cmd_experiment(const ExperimentOptions& opt) {
  ExperimentSpec spec;
  const char* which_name = nullptr;
  switch (opt.which) {
    case Which::degeneracy:
      spec = degeneracy_spec();
      which_name = "degeneracy";
      break;
    case Which::basins:
      spec = basin_spec();
      which_name = "basins";
      break;
    case Which::convergence:
      spec = convergence_spec();
      which_name = "convergence";
      break;
  }
  if (opt.trials) spec.trials = *opt.trials;
  if (opt.seed) spec.seed = *opt.seed;
  spec.threads = opt.threads;

  std::vector<std::string> outputs;
  const json config = experiment_config_json(which_name, spec, opt.out_dir);

  switch (opt.which) {
    case Which::degeneracy: {
      const DegeneracyResult result = run_degeneracy_experiment(spec);
      write_file(join_path(opt.out_dir, "matrix.txt"),
                 spd_matrix_text(result.a.matrix()));
      write_file(join_path(opt.out_dir, "x_star.txt"), matrix_text(result.x_star));
      outputs = {"matrix.txt", "x_star.txt"};
      for (std::size_t t = 0; t < result.runs.size(); ++t) {
        const std::string name = trial_file_name("trial", static_cast<int>(t));
        write_file(join_path(opt.out_dir, name), trace_csv(result.runs[t]));
        outputs.push_back(name);
      }
      break;
    }
    case Which::basins: {
      const BasinResult result = run_basin_experiment(spec);
      write_file(join_path(opt.out_dir, "matrix.txt"),
                 spd_matrix_text(result.a.matrix()));
      write_file(join_path(opt.out_dir, "census.csv"), census_csv(result));
      outputs = {"matrix.txt", "census.csv"};
      break;
    }
    case Which::convergence: {
      const ConvergenceResult result = run_convergence_experiment(spec);
      write_file(join_path(opt.out_dir, "fits.csv"), convergence_fits_csv(result));
      outputs = {"fits.csv"};
      for (std::size_t t = 0; t < result.trials.size(); ++t) {
        const std::string name = trial_file_name("trial", static_cast<int>(t));
        write_file(join_path(opt.out_dir, name),
                   convergence_trial_csv(result.trials[t]));
        outputs.push_back(name);
      }
      break;
    }
  }

  outputs.push_back("manifest.json");
  write_manifest(opt.out_dir, config, outputs);
  std::printf("%s: %d trials written to %s\n", which_name, spec.trials,
              opt.out_dir.c_str());
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Newton solvers for the matrix field F(X) = AX - X X^T A X"};
  app.require_subcommand(1);

  // --- solve ---------------------------------------------------------------
  SolveOptions solve;
  std::string method_name = "geometric";
  std::string inner_name = "krylov";
  CLI::App* solve_cmd =
      app.add_subcommand("solve", "Run one Newton iteration to a zero of the field");
  solve_cmd->add_option("--n", solve.n, "Problem dimension (ignored with --matrix-file)")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--p", solve.p, "Number of columns of the iterate")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--seed", solve.seed, "Seed for the synthetic matrix and start")
      ->envname("OJA_NEWTON_SEED");
  solve_cmd->add_option("--method", method_name, "Newton variant")
      ->check(CLI::IsMember({"plain", "geometric"}));
  solve_cmd->add_option("--max-iter", solve.cfg.max_outer_iters, "Outer iteration budget")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--tol", solve.cfg.residual_tol, "Outer residual tolerance");
  solve_cmd->add_option("--inner", inner_name, "Inner linear solver")
      ->check(CLI::IsMember({"dense", "krylov"}));
  solve_cmd->add_option("--matrix-file", solve.matrix_file,
                        "Symmetric matrix file (first line n, then n rows)");
  solve_cmd->add_option("--x0-file", solve.x0_file,
                        "Start point file (first line 'rows cols', then rows)");
  solve_cmd->add_option("--out", solve.out_dir, "Output directory");

  // --- experiment ------------------------------------------------------------
  ExperimentOptions experiment;
  std::string which_name = "degeneracy";
  int trials_flag = 0;
  std::uint64_t seed_flag = 0;
  CLI::App* experiment_cmd =
      app.add_subcommand("experiment", "Reproduce one of the study datasets");
  experiment_cmd->add_option("--which", which_name, "Which study to run")
      ->required()
      ->check(CLI::IsMember({"degeneracy", "basins", "convergence"}));
  CLI::Option* trials_opt =
      experiment_cmd->add_option("--trials", trials_flag, "Trial count override")
          ->check(CLI::PositiveNumber);
  CLI::Option* seed_opt = experiment_cmd->add_option("--seed", seed_flag, "Seed override")
                              ->envname("OJA_NEWTON_SEED");
  experiment_cmd->add_option("--threads", experiment.threads, "Worker pool size")
      ->check(CLI::PositiveNumber);
  experiment_cmd->add_option("--out-dir", experiment.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadFlags;
  }

  try {
    if (solve_cmd->parsed()) {
      solve.method = method_name == "plain" ? NewtonMethod::plain : NewtonMethod::geometric;
      solve.cfg.inner_solver =
          inner_name == "dense" ? InnerSolver::dense : InnerSolver::krylov;
      try {
        solve.cfg.validate();
      } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadFlags;
      }
      return cmd_solve(solve);
    }

    if (which_name == "degeneracy") experiment.which = Which::degeneracy;
    if (which_name == "basins") experiment.which = Which::basins;
    if (which_name == "convergence") experiment.which = Which::convergence;
    if (trials_opt->count() > 0) experiment.trials = trials_flag;
    if (seed_opt->count() > 0) experiment.seed = seed_flag;
    return cmd_experiment(experiment);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadFlags;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolverFailure;
  }
}
