#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsity/constraint_set.hpp"
#include "sparsity/experiments.hpp"
#include "sparsity/solver.hpp"

namespace sparsity::io {

inline constexpr int kSchemaVersion = 1;

// Every parser throws InputError with a readable message on malformed input.

/// {"kind": "grid1d"|"grid2d"|"tree"|"none", "n" | "rows"/"cols" | "parents",
///  "set": {"kind": "l1ball", "alpha": a} | {"kind": "orthant"}}
ConstraintDescription constraint_from_json(const nlohmann::json& j);
nlohmann::json constraint_to_json(const ConstraintDescription& desc);

/// {"X": [[...], ...], "y": [...], "rho": r}
RegressionProblem problem_from_json(const nlohmann::json& j);
nlohmann::json problem_to_json(const RegressionProblem& problem);

/// {"schema_version": 1, "beta", "lambda", "objective_history",
///  "inner_iteration_counts", "converged", "wall_time_ms"}
nlohmann::json result_to_json(const SolveResult& result, bool zero_timing = false);

/// Either a full spec or {"preset": name} plus field overrides.
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);
nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec);

inline constexpr const char* kCsvHeader =
    "method,m,run,model_error,wall_time_ms,inner_iters_mean,rho_selected,alpha_selected";

/// CSV with kCsvHeader; alpha_selected is empty when absent. Numbers are
/// written with 17 significant digits.
void write_results_csv(std::ostream& out, const std::vector<ResultRecord>& records,
                       bool zero_timing = false);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace sparsity::io
