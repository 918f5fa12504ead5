#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "sparsity/errors.hpp"
#include "sparsity/kernels.hpp"
#include "sparsity/oracles.hpp"
#include "sparsity/prox.hpp"
#include "sparsity/solver.hpp"

using namespace sparsity;
using testing_util::distance;
using testing_util::gaussian_matrix;
using testing_util::uniform_vector;

namespace {

RegressionProblem random_problem(std::mt19937_64& rng, std::size_t m, std::size_t n, double rho) {
  RegressionProblem p;
  p.X = gaussian_matrix(rng, m, n);
  std::vector<double> beta(n, 0.0);
  for (std::size_t i = n / 4; i < n / 2; ++i) beta[i] = (i % 2 ? 1.0 : -1.0);
  p.y = p.X.multiply(beta);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (double& v : p.y) v += noise(rng);
  p.rho = rho;
  return p;
}

}  // namespace

TEST_CASE("lipschitz constant") {
  CHECK(lipschitz_constant(Matrix::identity(5)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lipschitz_constant(Matrix::identity(5, 2.0)) == doctest::Approx(4.0).epsilon(1e-12));
  std::mt19937_64 rng(1);
  const Matrix X = gaussian_matrix(rng, 10, 6);
  const double exact = spectral_norm_squared(X, LipschitzMethod::exact_svd);
  const double power = spectral_norm_squared(X, LipschitzMethod::power_iteration);
  CHECK(power == doctest::Approx(exact).epsilon(1e-6));
  CHECK(lipschitz_constant(X, LipschitzMethod::power_iteration) >= exact);
  const Matrix wide = gaussian_matrix(rng, 4, 12);
  CHECK(spectral_norm_squared(wide, LipschitzMethod::power_iteration) ==
        doctest::Approx(spectral_norm_squared(wide, LipschitzMethod::exact_svd)).epsilon(1e-6));
}

TEST_CASE("theta recursion") {
  CHECK(theta_next(1.0) == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-15));
  double theta = 1.0;
  for (int t = 1; t <= 1000; ++t) {
    CHECK(theta <= 2.0 / (t + 1) + 1e-15);
    const double next = theta_next(theta);
    CHECK(std::abs((1 - next) / (next * next) - 1 / (theta * theta)) <
          1e-12 * std::max(1.0, 1 / (theta * theta)));
    theta = next;
  }
  CHECK_THROWS_AS(theta_next(0.0), DomainError);
  CHECK_THROWS_AS(theta_next(1.5), DomainError);
  CHECK(momentum_pi(0.5, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("gamma_objective") {
  RegressionProblem p;
  p.X = Matrix::identity(3);
  p.y = {1.0, 2.0, 2.0};
  p.rho = 1.0;
  const std::vector<double> zero(3, 0.0), ones(3, 1.0);
  CHECK(gamma_objective(p, zero, zero) == doctest::Approx(4.5));
  p.y = {0.0, 0.0, 0.0};
  CHECK(gamma_objective(p, zero, ones) == doctest::Approx(1.5));
  const std::vector<double> beta{1.0, -2.0, 0.0}, abs_beta{1.0, 2.0, 0.0};
  CHECK(gamma_objective(p, beta, abs_beta) == doctest::Approx(lasso_objective(p, beta)));
  CHECK(std::isinf(gamma_objective(p, beta, zero)));
}

TEST_CASE("config validation") {
  SolverConfig c;
  c.kappa = 1.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = {};
  c.outer_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  RegressionProblem p;
  p.X = Matrix(3, 2);
  p.y = {1.0, 2.0};
  CHECK_THROWS_AS(p.validate(), InvalidDimension);
  p.y = {1.0, 2.0, 3.0};
  p.rho = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.rho = 1.0;
  CHECK_THROWS_AS(nepio_solve(p, ConstraintSet::unconstrained(3)), InvalidDimension);
}

TEST_CASE("zero response gives the zero solution") {
  std::mt19937_64 rng(2);
  RegressionProblem p;
  p.X = gaussian_matrix(rng, 8, 10);
  p.y.assign(8, 0.0);
  p.rho = 0.5;
  const auto res = nepio_solve(p, ConstraintSet::grid_1d(10, 1.0));
  for (double b : res.beta) CHECK(b == 0.0);
  for (double l : res.lambda) CHECK(l == doctest::Approx(0.0).epsilon(1e-6));
  const auto lasso = lasso_fista(p);
  for (double b : lasso.beta) CHECK(b == 0.0);
}

TEST_CASE("lasso_fista closed form under an orthonormal design") {
  RegressionProblem p;
  p.X = Matrix::identity(5);
  p.y = {3.0, -0.2, 0.5, -2.0, 1.1};
  p.rho = 0.6;
  SolverConfig cfg;
  cfg.outer_tol = 1e-14;
  const auto res = lasso_fista(p, cfg);
  for (std::size_t i = 0; i < 5; ++i) {
    const double expected = std::copysign(std::max(std::abs(p.y[i]) - 0.6, 0.0), p.y[i]);
    CHECK(res.beta[i] == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("lasso_fista matches coordinate descent") {
  std::mt19937_64 rng(3);
  const auto p = random_problem(rng, 8, 5, 0.3);
  SolverConfig cfg;
  cfg.outer_tol = 1e-15;
  cfg.max_outer = 100000;
  const auto fista = lasso_fista(p, cfg);
  const auto cd = oracles::lasso_coordinate_descent(p);
  CHECK(oracles::lasso_kkt_violation(p, cd) <= 1e-8);
  const double f_cd = lasso_objective(p, cd);
  CHECK(std::abs(lasso_objective(p, fista.beta) - f_cd) <= 1e-6 * f_cd);
}

TEST_CASE("k = 0 reduces to the Lasso") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 3; ++trial) {
    const auto p = random_problem(rng, 20, 30, 0.5);
    SolverConfig cfg;
    cfg.outer_tol = 1e-12;
    cfg.inner_tol = 1e-10;
    cfg.max_outer = 100000;
    const auto nepio = nepio_solve(p, ConstraintSet::unconstrained(30), cfg);
    const auto fista = lasso_fista(p, cfg);
    const double f_n = lasso_objective(p, nepio.beta);
    const double f_f = lasso_objective(p, fista.beta);
    CHECK(std::abs(f_n - f_f) <= 1e-6 * f_f);
    CHECK(distance(nepio.beta, fista.beta) / std::max(testing_util::l2(fista.beta), 1.0) <= 1e-4);
  }
}

TEST_CASE("solver output invariants") {
  std::mt19937_64 rng(5);
  const auto p = random_problem(rng, 15, 20, 0.4);
  const std::vector<long> chain = [] {
    std::vector<long> parent(20);
    for (long i = 0; i < 20; ++i) parent[i] = i - 1;
    return parent;
  }();
  const ConstraintSet sets[] = {ConstraintSet::grid_1d(20, 1.0), ConstraintSet::tree(chain),
                                ConstraintSet::grid_2d(4, 5, 2.0)};
  SolverConfig tight;
  tight.inner_tol = 1e-8;
  for (const auto& set : sets) {
    CHECK(nepio_solve(p, set, tight).diagnostics.converged);
    // Default (loose) inner tolerance: invariants must hold regardless.
    const auto res = nepio_solve(p, set);
    for (std::size_t i = 0; i < 20; ++i)
      if (res.lambda[i] == 0.0) CHECK(res.beta[i] == 0.0);
    const double tol = 10.0 * SolverConfig{}.inner_tol * testing_util::l2(res.lambda);
    CHECK(is_feasible(set, res.lambda, tol));
    const auto& hist = res.diagnostics.objective_history;
    double running = hist.front();
    for (std::size_t t = 1; t < hist.size(); ++t) {
      CHECK(std::isfinite(hist[t]));
      const double next = std::min(running, hist[t]);
      CHECK(next <= running);
      running = next;
    }
    CHECK(res.diagnostics.inner_iteration_counts.size() + 1 == hist.size());
  }
}

TEST_CASE("acceleration is never worse than the plain iteration") {
  std::mt19937_64 rng(6);
  const auto p = random_problem(rng, 15, 20, 0.4);
  const auto set = ConstraintSet::grid_1d(20, 1.0);
  SolverConfig fast;
  fast.inner_tol = 1e-10;
  fast.outer_tol = 1e-15;
  const auto acc = nepio_solve(p, set, fast);
  SolverConfig plain = fast;
  plain.accelerate = false;
  plain.outer_tol = 1e-30;
  plain.max_outer = 10 * acc.diagnostics.t;
  const auto slow = nepio_solve(p, set, plain);
  const double f_acc = acc.diagnostics.objective_history.back();
  const double f_slow = slow.diagnostics.objective_history.back();
  CHECK(f_acc <= f_slow + 1e-6 * std::abs(f_slow));
}

TEST_CASE("outer step equals a direct prox call") {
  std::mt19937_64 rng(7);
  const auto p = random_problem(rng, 12, 16, 0.3);
  const auto set = ConstraintSet::grid_1d(16, 1.0);
  SolverConfig cfg;
  cfg.max_outer = 1;
  cfg.inner_tol = 1e-10;
  const auto res = nepio_solve(p, set, cfg);
  CHECK_FALSE(res.diagnostics.converged);

  // First iteration: w = (0, 1), so alpha = X^T y / L, mu = 1.
  const double L = res.diagnostics.lipschitz;
  auto alpha = p.X.multiply_transpose(p.y);
  for (double& a : alpha) a /= L;
  const std::vector<double> mu(16, 1.0);
  const CompositeMap B(set);
  const auto direct = prox_gamma({B, alpha, mu, p.rho / L, B.default_c()}, {0.2, 1e-10, 10000});
  CHECK(distance(direct.beta, res.beta) <= 1e-6);
  CHECK(distance(direct.lambda, res.lambda) <= 1e-6);
}

TEST_CASE("solves are deterministic") {
  std::mt19937_64 rng(8);
  const auto p = random_problem(rng, 12, 24, 0.3);
  const auto set = ConstraintSet::grid_2d(4, 6, 2.0);
  const auto a = nepio_solve(p, set);
  const auto b = nepio_solve(p, set);
  CHECK(a.beta == b.beta);
}

TEST_CASE("nepio against the full-problem oracle on a small grid") {
  std::mt19937_64 rng(9);
  RegressionProblem p;
  p.X = gaussian_matrix(rng, 15, 20);
  std::vector<double> beta(20, 0.0);
  for (std::size_t i = 6; i < 12; ++i) beta[i] = (i % 3 ? 1.0 : -1.0);
  p.y = p.X.multiply(beta);
  double scale = 0.0;
  for (double g : p.X.multiply_transpose(p.y)) scale = std::max(scale, std::abs(g));
  p.rho = 0.05 * scale;
  const auto set = ConstraintSet::grid_1d(20, 1.0);
  SolverConfig cfg;
  cfg.inner_tol = 1e-8;
  const auto res = nepio_solve(p, set, cfg);
  REQUIRE(res.diagnostics.converged);
  const auto ref = oracles::full_problem_oracle(p, set);
  CHECK(std::abs(gamma_objective(p, res.beta, res.lambda) - gamma_objective(p, ref.beta, ref.lambda)) <=
        1e-5 * gamma_objective(p, ref.beta, ref.lambda));
  const double f = gamma_objective(p, res.beta, res.lambda);
  const double f_ref = gamma_objective(p, ref.beta, ref.lambda);
  CHECK(f <= f_ref + 1e-3 * f_ref);
}
