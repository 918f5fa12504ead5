// Command-line entry point: solve, experiment, bench-prox.
//
// Exit codes: 0 success, 1 input error, 2 solver did not converge.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "sparsity/errors.hpp"
#include "sparsity/experiments.hpp"
#include "sparsity/io.hpp"
#include "sparsity/solver.hpp"

namespace {

using namespace sparsity;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNotConverged = 2;

struct SolverOverrides {
  std::optional<double> kappa;
  std::optional<double> inner_tol;
  std::optional<double> outer_tol;
  std::optional<std::size_t> max_outer;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--kappa", kappa, "Opial averaging parameter in (0, 1)");
    cmd.add_option("--inner-tol", inner_tol, "Relative-change tolerance of the inner fixed-point loop");
    cmd.add_option("--outer-tol", outer_tol, "Relative objective-decrease tolerance of the outer loop");
    cmd.add_option("--max-outer", max_outer, "Outer iteration budget");
  }

  void apply(SolverConfig& c) const {
    if (kappa) c.kappa = *kappa;
    if (inner_tol) c.inner_tol = *inner_tol;
    if (outer_tol) c.outer_tol = *outer_tol;
    if (max_outer) c.max_outer = *max_outer;
  }
};

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

int cmd_solve(const std::string& problem_path, const std::string& constraint_path,
              const std::string& out_path, const SolverOverrides& overrides, bool zero_timing) {
  const RegressionProblem problem = io::problem_from_json(io::read_json_file(problem_path));
  const ConstraintDescription desc = io::constraint_from_json(io::read_json_file(constraint_path));
  if (desc.n != problem.X.cols())
    throw InputError("constraint dimension " + std::to_string(desc.n) +
                     " does not match the " + std::to_string(problem.X.cols()) + " design columns");
  const ConstraintSet set = ConstraintSet::from_description(desc);
  SolverConfig config;
  overrides.apply(config);
  config.validate();

  const SolveResult result = nepio_solve(problem, set, config);
  io::write_text_file(out_path, io::result_to_json(result, zero_timing).dump(2) + "\n");

  const auto& d = result.diagnostics;
  std::cout << "solve: " << (d.converged ? "converged" : "NOT converged") << " after " << d.t
            << " outer iterations, objective " << fmt(d.objective_history.back(), "%.10g")
            << ", mean inner iterations " << fmt(d.inner_iterations_mean(), "%.1f") << "\n";
  return d.converged ? kOk : kNotConverged;
}

int cmd_experiment(const std::string& spec_path, const std::string& preset,
                   const std::string& out_path, const SolverOverrides& overrides,
                   std::optional<std::uint64_t> seed, std::optional<std::string> select,
                   std::optional<std::size_t> runs, bool zero_timing) {
  ExperimentSpec spec;
  if (!spec_path.empty()) {
    spec = io::experiment_spec_from_json(io::read_json_file(spec_path));
  } else {
    nlohmann::json j;
    j["preset"] = preset;
    spec = io::experiment_spec_from_json(j);
  }
  overrides.apply(spec.solver);
  if (seed) spec.seed = *seed;
  if (runs) spec.runs = *runs;
  if (select) spec.selection = parse_selection(*select);
  spec.validate();
  spec.solver.validate();

  const auto records = run_experiment(spec);
  std::ostringstream csv;
  io::write_results_csv(csv, records, zero_timing);
  io::write_text_file(out_path, csv.str());

  std::size_t unconverged = 0;
  for (const auto& r : records) unconverged += !r.converged;
  for (const auto& row : summarize(records)) {
    std::cout << to_string(row.method) << " " << (spec.kind == ExperimentKind::scaling ? "n" : "m")
              << "=" << row.m << ": mean error " << fmt(row.mean_error, "%.4f") << " +- "
              << fmt(row.stderr_error, "%.4f");
    if (!zero_timing) std::cout << ", mean time " << fmt(row.mean_time_ms, "%.1f") << " ms";
    std::cout << ", mean inner iterations " << fmt(row.mean_inner_iters, "%.1f") << " ("
              << row.count << " runs)\n";
  }
  if (unconverged > 0) {
    std::cout << unconverged << " of " << records.size() << " selected fits did not converge\n";
    return kNotConverged;
  }
  return kOk;
}

int cmd_bench_prox(std::size_t n, const std::string& structure, std::size_t repetitions,
                   std::uint64_t seed, double tol, double kappa, const std::string& out_path) {
  const auto report = bench_prox(n, structure, repetitions, seed, tol, kappa);
  std::cout << "bench-prox " << structure << " n=" << n << ": mean " << fmt(report.mean_ms, "%.4f")
            << " ms, stddev " << fmt(report.stddev_ms, "%.4f") << " ms, mean iterations "
            << fmt(report.mean_iterations, "%.1f") << " over " << repetitions << " repetitions\n";
  if (!out_path.empty()) {
    nlohmann::json j{{"schema_version", io::kSchemaVersion},
                     {"n", report.n},
                     {"structure", report.structure},
                     {"repetitions", repetitions},
                     {"times_ms", report.times_ms},
                     {"iterations", report.iterations},
                     {"mean_ms", report.mean_ms},
                     {"stddev_ms", report.stddev_ms},
                     {"mean_iterations", report.mean_iterations}};
    io::write_text_file(out_path, j.dump(2) + "\n");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured-sparsity regression solver"};
  app.require_subcommand(1);

  bool zero_timing = false;
  SolverOverrides overrides;

  auto* solve = app.add_subcommand("solve", "Solve one problem with NEPIO");
  std::string problem_path, constraint_path, solve_out;
  solve->add_option("--problem", problem_path, "Problem JSON {X, y, rho}")->required();
  solve->add_option("--constraint", constraint_path, "Constraint JSON")->required();
  solve->add_option("--out", solve_out, "Result JSON path")->required();
  overrides.add_to(*solve);
  solve->add_flag("--zero-timing", zero_timing, "Write 0 for wall-clock fields");

  auto* experiment = app.add_subcommand("experiment", "Run an experiment spec or preset");
  std::string spec_path, preset, experiment_out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> select;
  std::optional<std::size_t> runs;
  auto* spec_opt = experiment->add_option("--spec", spec_path, "Experiment spec JSON");
  experiment->add_option("--preset", preset, "regions1d | regions2d | scaling | wavelet_tree")
      ->excludes(spec_opt);
  experiment->add_option("--out", experiment_out, "Results CSV path")->required();
  overrides.add_to(*experiment);
  experiment->add_option("--seed", seed, "Base seed");
  experiment->add_option("--select", select, "Hyperparameter selection: oracle | validation");
  experiment->add_option("--runs", runs, "Runs per sample size");
  experiment->add_flag("--zero-timing", zero_timing, "Write 0 for wall-clock fields");

  auto* bench = app.add_subcommand("bench-prox", "Time the prox computation on random inputs");
  std::size_t bench_n = 0, repetitions = 10;
  std::string structure = "grid1d", bench_out;
  std::uint64_t bench_seed = 1;
  double bench_tol = 1e-2, bench_kappa = 0.2;
  bench->add_option("--n", bench_n, "Number of variables")->required();
  bench->add_option("--structure", structure, "grid1d | grid2d | tree");
  bench->add_option("--repetitions", repetitions, "Number of timed prox calls");
  bench->add_option("--seed", bench_seed, "Seed of the random inputs");
  bench->add_option("--inner-tol", bench_tol, "Fixed-point tolerance");
  bench->add_option("--kappa", bench_kappa, "Opial averaging parameter");
  bench->add_option("--out", bench_out, "Optional JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*solve)
      return cmd_solve(problem_path, constraint_path, solve_out, overrides, zero_timing);
    if (*experiment) {
      if (spec_path.empty() && preset.empty()) throw InputError("experiment needs --spec or --preset");
      return cmd_experiment(spec_path, preset, experiment_out, overrides, seed, select, runs,
                            zero_timing);
    }
    return cmd_bench_prox(bench_n, structure, repetitions, bench_seed, bench_tol, bench_kappa,
                          bench_out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const InvalidDimension& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const InvalidStructure& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kInputError;
}
