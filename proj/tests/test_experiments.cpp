#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "sparsity/errors.hpp"
#include "sparsity/experiments.hpp"

using namespace sparsity;

namespace {

std::size_t nonzeros(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double x) { return x != 0.0; }));
}

// Maximal runs of nonzeros in a 1D vector.
std::vector<std::size_t> runs_of(const std::vector<double>& v) {
  std::vector<std::size_t> runs;
  std::size_t current = 0;
  for (double x : v) {
    if (x != 0.0) {
      ++current;
    } else if (current > 0) {
      runs.push_back(current);
      current = 0;
    }
  }
  if (current > 0) runs.push_back(current);
  return runs;
}

ExperimentSpec tiny_spec(ExperimentKind kind) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.n = 30;
  spec.sparsity = 6;
  spec.region_count = 2;
  spec.rows = spec.cols = 8;
  spec.pattern = "one_5x5";
  spec.sample_sizes = {20};
  spec.runs = 2;
  spec.rho_grid = {0.1, 1.0};
  spec.alpha_grid = {2.0, 8.0};
  spec.seed = 3;
  spec.solver.max_outer = 200;
  return spec;
}

}  // namespace

TEST_CASE("region lengths") {
  CHECK(region_lengths(20, 2) == std::vector<std::size_t>{10, 10});
  CHECK(region_lengths(20, 3) == std::vector<std::size_t>{7, 7, 6});
  CHECK(region_lengths(5, 5) == std::vector<std::size_t>{1, 1, 1, 1, 1});
  CHECK_THROWS_AS(region_lengths(2, 3), DomainError);
}

TEST_CASE("1D region model") {
  std::mt19937_64 rng(1);
  for (std::size_t regions = 1; regions <= 4; ++regions) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto beta = make_region_model_1d(200, regions, 20, rng);
      CHECK(nonzeros(beta) == 20);
      auto runs = runs_of(beta);
      auto expected = region_lengths(20, regions);
      std::sort(runs.begin(), runs.end());
      std::sort(expected.begin(), expected.end());
      CHECK(runs == expected);
      for (double b : beta) CHECK((b == 0.0 || std::abs(b) == 1.0));
    }
  }
  // Tightest fit: 20 ones and 3 separating zeros in 23 cells.
  const auto tight = make_region_model_1d(23, 4, 20, rng);
  CHECK(runs_of(tight).size() == 4);
  CHECK_THROWS_AS(make_region_model_1d(22, 4, 20, rng), DomainError);
}

TEST_CASE("2D region patterns") {
  std::mt19937_64 rng(2);
  const std::pair<const char*, std::size_t> cases[] = {
      {"one_5x5", 25}, {"two_4x4_3x3", 25}, {"three_3x3", 27}, {"four_3x2", 24}};
  for (const auto& [name, count] : cases) {
    const auto beta = make_region_model_2d(20, 20, name, rng);
    CHECK(beta.size() == 400);
    CHECK(nonzeros(beta) == count);
  }
  CHECK_THROWS_AS(region_pattern_2d("hexagon"), DomainError);
  CHECK_THROWS_AS(make_region_model_2d(4, 4, "one_5x5", rng), DomainError);
}

TEST_CASE("2D rectangles keep a margin") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto beta = make_region_model_2d(12, 12, "four_3x2", rng);
    // With the margin, the 4-connected components of the support are the rectangles.
    std::vector<int> label(beta.size(), -1);
    int components = 0;
    for (std::size_t start = 0; start < beta.size(); ++start) {
      if (beta[start] == 0.0 || label[start] >= 0) continue;
      std::vector<std::size_t> stack{start};
      label[start] = components;
      while (!stack.empty()) {
        const std::size_t c = stack.back();
        stack.pop_back();
        const std::size_t r = c / 12, k = c % 12;
        const std::size_t nb[4] = {r > 0 ? c - 12 : c, r < 11 ? c + 12 : c, k > 0 ? c - 1 : c,
                                   k < 11 ? c + 1 : c};
        for (std::size_t q : nb)
          if (beta[q] != 0.0 && label[q] < 0) {
            label[q] = components;
            stack.push_back(q);
          }
      }
      ++components;
    }
    CHECK(components == 4);
  }
}

TEST_CASE("data generation") {
  std::mt19937_64 rng(4);
  const Matrix X = gaussian_design(200, 50, rng);
  double mean = 0.0, sq = 0.0;
  for (std::size_t r = 0; r < X.rows(); ++r)
    for (double v : X.row(r)) {
      mean += v;
      sq += v * v;
    }
  mean /= 10000.0;
  CHECK(std::abs(mean) < 0.05);
  CHECK(sq / 10000.0 == doctest::Approx(1.0).epsilon(0.05));

  std::vector<double> beta(50, 0.0);
  beta[3] = 1.0;
  const auto y = generate_output(X, beta, 0.0, rng);
  for (std::size_t r = 0; r < 200; ++r) CHECK(y[r] == X(r, 3));
  const auto noisy = generate_output(X, beta, 0.5, rng);
  CHECK(noisy != y);
}

TEST_CASE("model error") {
  const std::vector<double> star{3.0, 0.0, -4.0};
  CHECK(model_error(std::vector<double>(3, 0.0), star) == doctest::Approx(1.0));
  CHECK(model_error(star, star) == 0.0);
  CHECK(model_error(std::vector<double>{3.0, 0.0, 0.0}, star) == doctest::Approx(0.8));
  CHECK(model_error(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 0.0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(model_error(std::vector<double>(2), star), InvalidDimension);
}

TEST_CASE("cell generators and grid shapes") {
  auto a = cell_rng(7, 40, 3), b = cell_rng(7, 40, 3), c = cell_rng(7, 40, 4), d = cell_rng(7, 41, 3);
  const auto first = a();
  CHECK(first == b());
  CHECK(first != c());
  CHECK(first != d());
  CHECK(grid_shape(400) == std::pair<std::size_t, std::size_t>{20, 20});
  CHECK(grid_shape(200) == std::pair<std::size_t, std::size_t>{10, 20});
  CHECK(grid_shape(6400) == std::pair<std::size_t, std::size_t>{80, 80});
  CHECK(grid_shape(7) == std::pair<std::size_t, std::size_t>{1, 7});
  CHECK_THROWS_AS(grid_shape(1), InvalidDimension);
}

TEST_CASE("presets") {
  for (const char* name : {"regions1d", "regions2d", "scaling", "wavelet_tree"}) {
    const auto spec = experiment_preset(name);
    CHECK_NOTHROW(spec.validate());
    CHECK(spec.seed == 7);
    CHECK(spec.solver.inner_tol == 1e-2);
    CHECK(spec.solver.outer_tol == 1e-8);
    CHECK(spec.solver.kappa == 0.2);
  }
  const auto r1 = experiment_preset("regions1d");
  CHECK(std::find(r1.sample_sizes.begin(), r1.sample_sizes.end(), 40u) != r1.sample_sizes.end());
  CHECK(experiment_preset("scaling").problem_sizes.front() == 200);
  CHECK(experiment_preset("scaling").problem_sizes.back() == 6400);
  CHECK_THROWS_AS(experiment_preset("regions3d"), DomainError);
  const auto grid = default_rho_grid();
  CHECK(grid.size() == 8);
  CHECK(grid.front() == doctest::Approx(1e-4));
  CHECK(grid.back() == doctest::Approx(10.0));
}

TEST_CASE("spec validation") {
  auto spec = tiny_spec(ExperimentKind::regions1d);
  CHECK_NOTHROW(spec.validate());
  spec.runs = 0;
  CHECK_THROWS_AS(spec.validate(), DomainError);
  spec = tiny_spec(ExperimentKind::regions1d);
  spec.sparsity = 40;
  CHECK_THROWS_AS(spec.validate(), InvalidDimension);
  spec = tiny_spec(ExperimentKind::regions2d);
  spec.methods = {Method::tree_c};
  CHECK_THROWS_AS(spec.validate(), DomainError);
  spec = tiny_spec(ExperimentKind::regions1d);
  spec.rho_grid = {};
  CHECK_THROWS_AS(spec.validate(), DomainError);
  CHECK_THROWS_AS(parse_method("ridge"), DomainError);
  CHECK(parse_method("grid_c") == Method::grid_c);
  CHECK(parse_selection("validation") == Selection::validation);
  CHECK(parse_experiment_kind("wavelet_tree") == ExperimentKind::wavelet_tree);
}

TEST_CASE("run_experiment records and determinism") {
  for (auto kind : {ExperimentKind::regions1d, ExperimentKind::regions2d}) {
    auto spec = tiny_spec(kind);
    for (auto selection : {Selection::oracle, Selection::validation}) {
      spec.selection = selection;
      const auto a = run_experiment(spec);
      REQUIRE(a.size() == 4);
      for (const auto& r : a) {
        CHECK(r.m == 20);
        CHECK(std::isfinite(r.model_error));
        CHECK(r.model_error >= 0.0);
        CHECK(r.wall_time_ms >= 0.0);
        CHECK((r.rho_selected > 0.0));
        CHECK(r.alpha_selected.has_value() == (r.method == Method::grid_c));
      }
      const auto b = run_experiment(spec);
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].model_error == b[i].model_error);
        CHECK(a[i].rho_selected == b[i].rho_selected);
      }
    }
  }
}

TEST_CASE("oracle selection is never worse than a single grid point") {
  auto spec = tiny_spec(ExperimentKind::regions1d);
  spec.methods = {Method::lasso};
  const auto full = run_experiment(spec);
  for (double rho : spec.rho_grid) {
    auto single = spec;
    single.rho_grid = {rho};
    const auto one = run_experiment(single);
    for (std::size_t i = 0; i < full.size(); ++i) CHECK(full[i].model_error <= one[i].model_error);
  }
}

TEST_CASE("scaling and wavelet experiments") {
  ExperimentSpec spec = tiny_spec(ExperimentKind::scaling);
  spec.methods = {Method::grid_c};
  spec.problem_sizes = {64, 100};
  spec.rho_grid = {1.0};
  spec.alpha_grid = {8.0};
  spec.pattern = "three_3x3";
  const auto recs = run_experiment(spec);
  REQUIRE(recs.size() == 4);
  CHECK(recs[0].m == 64);
  CHECK(recs[3].m == 100);
  for (const auto& r : recs) CHECK(r.inner_iters_mean >= 1.0);

  ExperimentSpec w = experiment_preset("wavelet_tree");
  w.rows = w.cols = 8;
  w.runs = 2;
  w.rho_grid = {0.1, 1.0};
  const auto wrecs = run_experiment(w);
  REQUIRE(wrecs.size() == 4);
  for (const auto& r : wrecs) CHECK(std::isfinite(r.model_error));
}

TEST_CASE("summarize") {
  std::vector<ResultRecord> recs(4);
  recs[0] = {Method::lasso, 40, 0, 1.0, 2.0, 0.0, 0.1, std::nullopt, true};
  recs[1] = {Method::grid_c, 40, 0, 0.5, 4.0, 10.0, 0.1, 2.0, true};
  recs[2] = {Method::lasso, 40, 1, 3.0, 2.0, 0.0, 0.1, std::nullopt, true};
  recs[3] = {Method::grid_c, 40, 1, 0.5, 6.0, 20.0, 0.1, 2.0, true};
  const auto rows = summarize(recs);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].method == Method::lasso);
  CHECK(rows[0].mean_error == doctest::Approx(2.0));
  // Sample standard deviation sqrt(2), over sqrt(2) runs.
  CHECK(rows[0].stderr_error == doctest::Approx(1.0));
  CHECK(rows[1].stderr_error == 0.0);
  CHECK(rows[1].mean_time_ms == doctest::Approx(5.0));
  CHECK(rows[1].mean_inner_iters == doctest::Approx(15.0));
  CHECK(rows[1].count == 2);
}

TEST_CASE("bench_prox") {
  const auto report = bench_prox(100, "grid1d", 10);
  CHECK(report.times_ms.size() == 10);
  CHECK(report.iterations.size() == 10);
  CHECK(report.mean_ms > 0.0);
  CHECK(report.mean_iterations >= 1.0);
  CHECK_NOTHROW(bench_prox(64, "grid2d", 2));
  CHECK_NOTHROW(bench_prox(31, "tree", 2));
  CHECK_THROWS_AS(bench_prox(1, "grid1d", 2), InvalidDimension);
  CHECK_THROWS_AS(bench_prox(10, "ring", 2), DomainError);
}
