#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sparsity/constraint_set.hpp"
#include "sparsity/matrix.hpp"

namespace sparsity {

/// 1/2 ||X beta - y||^2 + rho * penalty.
struct RegressionProblem {
  Matrix X;
  std::vector<double> y;
  double rho = 1.0;

  void validate() const;
};

struct SolverConfig {
  double kappa = 0.2;
  double inner_tol = 1e-2;
  /// Stop when |F_{t-1} - F_t| <= outer_tol * |F_{t-1}|.
  double outer_tol = 1e-8;
  std::size_t max_outer = 10000;
  std::size_t max_inner = 10000;
  /// Upper bound on ||X^T X||; computed from X when absent.
  std::optional<double> lipschitz;
  /// false gives the plain proximal iteration w_t = u_t.
  bool accelerate = true;
  /// Start each inner fixed-point solve from the previous outer iteration's
  /// result; false restarts from zero.
  bool warm_start = false;

  void validate() const;
};

/// Outer-loop state and diagnostics of a NEPIO solve.
struct SolverState {
  std::vector<double> beta;
  std::vector<double> lambda;
  std::vector<double> beta_prev;
  std::vector<double> lambda_prev;
  std::vector<double> w_beta;
  std::vector<double> w_lambda;
  double theta = 1.0;
  double theta_prev = 1.0;
  double pi = 1.0;
  std::size_t t = 0;
  /// Gamma-objective at u_1, u_2, ... (first entry is the initial point).
  std::vector<double> objective_history;
  std::vector<std::size_t> inner_iteration_counts;
  std::vector<double> theta_history;
  std::vector<double> pi_history;
  double lipschitz = 0.0;
  bool converged = false;
  bool inner_all_converged = true;
  double wall_time_ms = 0.0;

  double inner_iterations_mean() const;
};

struct SolveResult {
  std::vector<double> beta;
  std::vector<double> lambda;
  SolverState diagnostics;
};

enum class LipschitzMethod { exact_svd, power_iteration };

/// Largest eigenvalue of X^T X: eigendecomposition of the smaller Gram matrix,
/// or power iteration to 1e-10 relative change.
double spectral_norm_squared(const Matrix& X, LipschitzMethod method);

/// Upper bound L on ||X^T X||. The power-iteration route is inflated by 1.01.
double lipschitz_constant(const Matrix& X,
                          LipschitzMethod method = LipschitzMethod::exact_svd);

/// Root in (0, 1) of (1 - t') / t'^2 = 1 / t^2.
double theta_next(double theta);

/// pi_{t} = 1 - theta_t + theta_t / theta_{t-1}.
double momentum_pi(double theta, double theta_prev);

/// 1/2 ||X beta - y||^2 + rho Gamma(beta, lambda); +inf where lambda_i = 0 and
/// beta_i != 0, or lambda_i < 0.
double gamma_objective(const RegressionProblem& problem, std::span<const double> beta,
                       std::span<const double> lambda);

/// 1/2 ||X beta - y||^2 + rho ||beta||_1.
double lasso_objective(const RegressionProblem& problem, std::span<const double> beta);

/// Accelerated proximal method on (beta, lambda) with the prox of rho*Gamma over
/// R^n x Lambda computed by Opial-averaged Picard iterations, warm-started
/// from the previous outer iteration.
SolveResult nepio_solve(const RegressionProblem& problem, const ConstraintSet& constraint,
                        const SolverConfig& config = {});

struct LassoResult {
  std::vector<double> beta;
  std::vector<double> objective_history;
  std::size_t iterations = 0;
  bool converged = false;
  double wall_time_ms = 0.0;
};

/// FISTA with soft-thresholding at rho / L and the same theta momentum.
LassoResult lasso_fista(const RegressionProblem& problem, const SolverConfig& config = {});

}  // namespace sparsity
