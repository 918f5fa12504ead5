#include "sparsity/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "sparsity/errors.hpp"

namespace sparsity::io {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key))
    throw InputError(std::string(where) + ": missing field '" + key + "'");
  return j.at(key);
}

double as_number(const json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string(what) + " must be a number");
  return j.get<double>();
}

std::size_t as_count(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw InputError(std::string(what) + " must be a nonnegative integer");
  return j.get<std::size_t>();
}

std::vector<double> as_vector(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(as_number(v, what));
  return out;
}

std::vector<std::size_t> as_counts(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<std::size_t> out;
  for (const auto& v : j) out.push_back(as_count(v, what));
  return out;
}

void check_schema(const json& j, const char* where) {
  if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion)
    throw InputError(std::string(where) + ": unsupported schema_version");
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ConstraintDescription constraint_from_json(const json& j) {
  constexpr const char* where = "constraint";
  if (!j.is_object()) throw InputError("constraint: expected a JSON object");
  check_schema(j, where);
  ConstraintDescription d;
  const auto& kind = require(j, "kind", where);
  if (!kind.is_string()) throw InputError("constraint: kind must be a string");
  const std::string k = kind.get<std::string>();
  using Kind = ConstraintDescription::Kind;
  if (k == "grid1d" || k == "none") {
    d.kind = k == "grid1d" ? Kind::grid1d : Kind::none;
    d.n = as_count(require(j, "n", where), "n");
  } else if (k == "grid2d") {
    d.kind = Kind::grid2d;
    d.rows = as_count(require(j, "rows", where), "rows");
    d.cols = as_count(require(j, "cols", where), "cols");
    d.n = d.rows * d.cols;
  } else if (k == "tree") {
    d.kind = Kind::tree;
    const auto& parents = require(j, "parents", where);
    if (!parents.is_array()) throw InputError("constraint: parents must be an array");
    for (const auto& p : parents) {
      if (!p.is_number_integer()) throw InputError("constraint: parents must be integers");
      d.parents.push_back(p.get<long>());
    }
    d.n = d.parents.size();
  } else {
    throw InputError("constraint: unknown kind '" + k + "'");
  }

  if (j.contains("set")) {
    const auto& set = j.at("set");
    const auto& sk = require(set, "kind", "constraint.set");
    if (sk == "l1ball") {
      const double alpha = as_number(require(set, "alpha", "constraint.set"), "alpha");
      if (!(alpha > 0.0)) throw InputError("constraint.set: alpha must be positive");
      d.set = L1Ball{alpha};
    } else if (sk == "orthant") {
      d.set = NonnegativeOrthant{};
    } else {
      throw InputError("constraint.set: kind must be 'l1ball' or 'orthant'");
    }
  } else if (d.kind == Kind::grid1d || d.kind == Kind::grid2d) {
    throw InputError("constraint: grid constraints need a 'set'");
  }
  return d;
}

json constraint_to_json(const ConstraintDescription& d) {
  using Kind = ConstraintDescription::Kind;
  json j;
  j["kind"] = to_string(d.kind);
  switch (d.kind) {
    case Kind::none:
    case Kind::grid1d: j["n"] = d.n; break;
    case Kind::grid2d:
      j["rows"] = d.rows;
      j["cols"] = d.cols;
      break;
    case Kind::tree: j["parents"] = d.parents; break;
    case Kind::custom: throw InvalidStructure("custom constraint sets have no JSON form");
  }
  if (const auto* ball = std::get_if<L1Ball>(&d.set))
    j["set"] = {{"kind", "l1ball"}, {"alpha", ball->radius}};
  else
    j["set"] = {{"kind", "orthant"}};
  return j;
}

RegressionProblem problem_from_json(const json& j) {
  constexpr const char* where = "problem";
  if (!j.is_object()) throw InputError("problem: expected a JSON object");
  check_schema(j, where);
  const auto& X = require(j, "X", where);
  if (!X.is_array() || X.empty()) throw InputError("problem: X must be a nonempty array of rows");
  const std::size_t rows = X.size();
  const std::size_t cols = X.front().is_array() ? X.front().size() : 0;
  if (cols == 0) throw InputError("problem: X rows must be nonempty arrays");
  std::vector<double> data;
  data.reserve(rows * cols);
  for (const auto& row : X) {
    const auto values = as_vector(row, "X row");
    if (values.size() != cols) throw InputError("problem: X rows differ in length");
    data.insert(data.end(), values.begin(), values.end());
  }
  RegressionProblem p;
  p.X = Matrix(rows, cols, std::move(data));
  p.y = as_vector(require(j, "y", where), "y");
  p.rho = as_number(require(j, "rho", where), "rho");
  if (p.y.size() != rows) throw InputError("problem: y length does not match the rows of X");
  if (!(p.rho > 0.0)) throw InputError("problem: rho must be positive");
  return p;
}

json problem_to_json(const RegressionProblem& p) {
  json X = json::array();
  for (std::size_t r = 0; r < p.X.rows(); ++r)
    X.push_back(std::vector<double>(p.X.row(r).begin(), p.X.row(r).end()));
  return {{"schema_version", kSchemaVersion}, {"X", X}, {"y", p.y}, {"rho", p.rho}};
}

json result_to_json(const SolveResult& result, bool zero_timing) {
  const auto& d = result.diagnostics;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["beta"] = result.beta;
  j["lambda"] = result.lambda;
  j["objective_history"] = d.objective_history;
  j["inner_iteration_counts"] = d.inner_iteration_counts;
  j["converged"] = d.converged;
  j["wall_time_ms"] = zero_timing ? 0.0 : d.wall_time_ms;
  return j;
}

ExperimentSpec experiment_spec_from_json(const json& j) {
  if (!j.is_object()) throw InputError("experiment spec: expected a JSON object");
  check_schema(j, "experiment spec");
  ExperimentSpec s;
  try {
    if (j.contains("preset")) {
      if (!j.at("preset").is_string()) throw InputError("experiment spec: preset must be a string");
      s = experiment_preset(j.at("preset").get<std::string>());
    } else {
      s.rho_grid = default_rho_grid();
      require(j, "kind", "experiment spec");
    }
    if (j.contains("kind")) {
      if (!j.at("kind").is_string()) throw InputError("experiment spec: kind must be a string");
      s.kind = parse_experiment_kind(j.at("kind").get<std::string>());
    }
  } catch (const DomainError& e) {
    throw InputError(std::string("experiment spec: ") + e.what());
  }

  if (j.contains("n")) s.n = as_count(j.at("n"), "n");
  if (j.contains("rows")) s.rows = as_count(j.at("rows"), "rows");
  if (j.contains("cols")) s.cols = as_count(j.at("cols"), "cols");
  if (j.contains("side")) s.rows = s.cols = as_count(j.at("side"), "side");
  if (j.contains("sparsity")) s.sparsity = as_count(j.at("sparsity"), "sparsity");
  if (j.contains("region_count")) s.region_count = as_count(j.at("region_count"), "region_count");
  if (j.contains("pattern")) {
    if (!j.at("pattern").is_string()) throw InputError("experiment spec: pattern must be a string");
    s.pattern = j.at("pattern").get<std::string>();
  }
  if (j.contains("sample_sizes")) s.sample_sizes = as_counts(j.at("sample_sizes"), "sample_sizes");
  if (j.contains("problem_sizes")) s.problem_sizes = as_counts(j.at("problem_sizes"), "problem_sizes");
  if (j.contains("runs")) s.runs = as_count(j.at("runs"), "runs");
  if (j.contains("noise_std")) s.noise_std = as_number(j.at("noise_std"), "noise_std");
  if (j.contains("snr_db")) {
    if (j.at("snr_db").is_null()) s.snr_db.reset();
    else s.snr_db = as_number(j.at("snr_db"), "snr_db");
  }
  if (j.contains("measurement_factor"))
    s.measurement_factor = as_number(j.at("measurement_factor"), "measurement_factor");
  if (j.contains("rho_grid")) s.rho_grid = as_vector(j.at("rho_grid"), "rho_grid");
  if (j.contains("alpha_grid")) s.alpha_grid = as_vector(j.at("alpha_grid"), "alpha_grid");
  if (j.contains("seed")) s.seed = as_count(j.at("seed"), "seed");
  try {
    if (j.contains("methods")) {
      if (!j.at("methods").is_array()) throw InputError("experiment spec: methods must be an array");
      s.methods.clear();
      for (const auto& m : j.at("methods")) {
        if (!m.is_string()) throw InputError("experiment spec: methods must be strings");
        s.methods.push_back(parse_method(m.get<std::string>()));
      }
    }
    if (j.contains("selection")) {
      if (!j.at("selection").is_string()) throw InputError("experiment spec: selection must be a string");
      s.selection = parse_selection(j.at("selection").get<std::string>());
    }
  } catch (const DomainError& e) {
    throw InputError(std::string("experiment spec: ") + e.what());
  }
  if (j.contains("solver")) {
    const auto& sj = j.at("solver");
    if (!sj.is_object()) throw InputError("experiment spec: solver must be an object");
    if (sj.contains("kappa")) s.solver.kappa = as_number(sj.at("kappa"), "kappa");
    if (sj.contains("inner_tol")) s.solver.inner_tol = as_number(sj.at("inner_tol"), "inner_tol");
    if (sj.contains("outer_tol")) s.solver.outer_tol = as_number(sj.at("outer_tol"), "outer_tol");
    if (sj.contains("max_outer")) s.solver.max_outer = as_count(sj.at("max_outer"), "max_outer");
    if (sj.contains("max_inner")) s.solver.max_inner = as_count(sj.at("max_inner"), "max_inner");
  }
  return s;
}

json experiment_spec_to_json(const ExperimentSpec& s) {
  json methods = json::array();
  for (Method m : s.methods) methods.push_back(to_string(m));
  json j{{"schema_version", kSchemaVersion},
         {"kind", to_string(s.kind)},
         {"n", s.n},
         {"rows", s.rows},
         {"cols", s.cols},
         {"sparsity", s.sparsity},
         {"region_count", s.region_count},
         {"pattern", s.pattern},
         {"sample_sizes", s.sample_sizes},
         {"problem_sizes", s.problem_sizes},
         {"runs", s.runs},
         {"noise_std", s.noise_std},
         {"measurement_factor", s.measurement_factor},
         {"rho_grid", s.rho_grid},
         {"alpha_grid", s.alpha_grid},
         {"methods", methods},
         {"selection", to_string(s.selection)},
         {"seed", s.seed},
         {"solver",
          {{"kappa", s.solver.kappa},
           {"inner_tol", s.solver.inner_tol},
           {"outer_tol", s.solver.outer_tol},
           {"max_outer", s.solver.max_outer},
           {"max_inner", s.solver.max_inner}}}};
  j["snr_db"] = s.snr_db ? json(*s.snr_db) : json(nullptr);
  return j;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRecord>& records,
                       bool zero_timing) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << to_string(r.method) << ',' << r.m << ',' << r.run << ','
        << format_number(r.model_error) << ','
        << format_number(zero_timing ? 0.0 : r.wall_time_ms) << ','
        << format_number(r.inner_iters_mean) << ',' << format_number(r.rho_selected) << ',';
    if (r.alpha_selected) out << format_number(*r.alpha_selected);
    out << '\n';
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path + "'");
}

}  // namespace sparsity::io
