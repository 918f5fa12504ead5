// Runs the sparsity binary as a subprocess and checks files and exit codes.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = SPARSITY_CLI_PATH;
const std::string kData = SPARSITY_TEST_DATA;

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("sparsity_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& log = "log.txt") {
  const std::string cmd = kCli + " " + args + " > " + (scratch() / log).string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tiny_args() {
  return "solve --problem " + kData + "/tiny_problem.json --constraint " + kData +
         "/tiny_constraint.json";
}

std::string write_scratch(const std::string& name, const std::string& text) {
  const auto path = scratch() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("solve matches the committed fixture") {
  const auto out = (scratch() / "tiny_result.json").string();
  REQUIRE(run(tiny_args() + " --out " + out +
              " --inner-tol 1e-10 --outer-tol 1e-14 --max-outer 100000") == 0);
  const auto result = json::parse(slurp(out));
  const auto expected = json::parse(slurp(kData + "/tiny_expected.json"));
  CHECK(result["schema_version"] == 1);
  CHECK(result["converged"] == true);
  REQUIRE(result["beta"].size() == expected["beta"].size());
  for (std::size_t i = 0; i < expected["beta"].size(); ++i)
    CHECK(std::abs(result["beta"][i].get<double>() - expected["beta"][i].get<double>()) <= 1e-6);
  CHECK(slurp(scratch() / "log.txt").find("converged") != std::string::npos);
}

TEST_CASE("solve output is byte-stable with zero timing") {
  const auto a = (scratch() / "a.json").string();
  const auto b = (scratch() / "b.json").string();
  REQUIRE(run(tiny_args() + " --zero-timing --out " + a) == 0);
  REQUIRE(run(tiny_args() + " --zero-timing --out " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(json::parse(slurp(a))["wall_time_ms"] == 0.0);
}

TEST_CASE("solve flags non-convergence") {
  const auto out = (scratch() / "flagged.json").string();
  CHECK(run(tiny_args() + " --max-outer 1 --out " + out) == 2);
  CHECK(json::parse(slurp(out))["converged"] == false);
}

TEST_CASE("solve input errors") {
  const auto out = (scratch() / "never.json").string();
  CHECK(run("solve --problem /nonexistent.json --constraint " + kData +
            "/tiny_constraint.json --out " + out) == 1);
  CHECK(slurp(scratch() / "log.txt").find("error") != std::string::npos);
  const auto broken = write_scratch("broken.json", "{\"X\": [[1, 2]], ");
  CHECK(run("solve --problem " + broken + " --constraint " + kData + "/tiny_constraint.json --out " +
            out) == 1);
  const auto wrong = write_scratch(
      "wrong.json", R"({"kind": "grid1d", "n": 4, "set": {"kind": "l1ball", "alpha": 1}})");
  CHECK(run("solve --problem " + kData + "/tiny_problem.json --constraint " + wrong + " --out " +
            out) == 1);
  CHECK(run(tiny_args() + " --kappa 1.5 --out " + out) == 1);
  CHECK(run(tiny_args() + " --out /nonexistent/dir/out.json") == 1);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("usage errors") {
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("solve --problem x.json") == 1);
  CHECK(run("--help") == 0);
}

TEST_CASE("experiment writes a deterministic csv") {
  const auto spec = write_scratch("spec.json", R"({
    "kind": "regions1d", "n": 40, "sparsity": 8, "region_count": 2,
    "sample_sizes": [16, 24], "runs": 2, "rho_grid": [0.1, 1.0], "alpha_grid": [2.0, 4.0],
    "methods": ["lasso", "grid_c"], "seed": 7, "solver": {"max_outer": 20000}})");
  const auto a = (scratch() / "a.csv").string();
  const auto b = (scratch() / "b.csv").string();
  CHECK(run("experiment --spec " + spec + " --zero-timing --out " + a, "exp_a.txt") == 0);
  CHECK(run("experiment --spec " + spec + " --zero-timing --out " + b, "exp_b.txt") == 0);
  const auto csv = slurp(a);
  CHECK(csv == slurp(b));
  CHECK(slurp(scratch() / "exp_a.txt") == slurp(scratch() / "exp_b.txt"));
  CHECK(csv.rfind("method,m,run,model_error,wall_time_ms,inner_iters_mean,rho_selected,alpha_selected\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 1 + 2 * 2 * 2);
  const auto log = slurp(scratch() / "exp_a.txt");
  CHECK(log.find("lasso m=16: mean error") != std::string::npos);
  CHECK(log.find("grid_c m=24: mean error") != std::string::npos);

  // A different seed gives different data.
  const auto c = (scratch() / "c.csv").string();
  CHECK(run("experiment --spec " + spec + " --zero-timing --seed 8 --out " + c) == 0);
  CHECK(slurp(c) != csv);
}

TEST_CASE("experiment flags non-convergence") {
  const auto spec = write_scratch("spec_short.json", R"({
    "kind": "regions1d", "n": 40, "sparsity": 8, "sample_sizes": [16], "runs": 1,
    "rho_grid": [0.1], "methods": ["grid_c"], "alpha_grid": [4.0]})");
  CHECK(run("experiment --spec " + spec + " --max-outer 2 --out " + (scratch() / "short.csv").string()) == 2);
  CHECK(fs::exists(scratch() / "short.csv"));
}

TEST_CASE("experiment input errors") {
  const auto out = (scratch() / "x.csv").string();
  CHECK(run("experiment --preset regions3d --out " + out) == 1);
  const auto unknown = write_scratch("unknown.json", R"({"preset": "regions3d"})");
  CHECK(run("experiment --spec " + unknown + " --out " + out) == 1);
  CHECK(run("experiment --preset regions1d --select best --out " + out) == 1);
  CHECK(run("experiment --spec /nonexistent.json --out " + out) == 1);
  const auto bad = write_scratch("bad.json", R"({"preset": "regions1d", "runs": 0})");
  CHECK(run("experiment --spec " + bad + " --out " + out) == 1);
  CHECK(run("experiment --out " + out) == 1);
}

TEST_CASE("bench-prox") {
  const auto out = (scratch() / "bench.json").string();
  CHECK(run("bench-prox --n 100 --structure grid1d --repetitions 10 --out " + out) == 0);
  const auto report = json::parse(slurp(out));
  CHECK(report["times_ms"].size() == 10);
  CHECK(report["mean_ms"].get<double>() > 0.0);
  for (const auto& t : report["times_ms"]) CHECK(t.get<double>() > 0.0);
  CHECK(slurp(scratch() / "log.txt").find("bench-prox grid1d n=100") != std::string::npos);
  CHECK(run("bench-prox --n 64 --structure grid2d --repetitions 2") == 0);
  CHECK(run("bench-prox --n 1") == 1);
  CHECK(run("bench-prox --n 10 --structure ring") == 1);
}
