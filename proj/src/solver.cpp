#include "sparsity/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "sparsity/errors.hpp"
#include "sparsity/kernels.hpp"
#include "sparsity/prox.hpp"

namespace sparsity {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double half_residual_sq(std::span<const double> xb, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (xb[i] - y[i]) * (xb[i] - y[i]);
  return 0.5 * s;
}

bool stalled(double previous, double current, double tol) {
  const double scale = std::max(std::abs(previous), std::numeric_limits<double>::min());
  return std::abs(previous - current) <= tol * scale;
}

}  // namespace

void RegressionProblem::validate() const {
  if (X.rows() == 0 || X.cols() == 0) throw InvalidDimension("design matrix is empty");
  if (y.size() != X.rows())
    throw InvalidDimension("response length does not match the design rows");
  if (!(rho > 0.0)) throw DomainError("rho must be positive");
}

void SolverConfig::validate() const {
  if (!(kappa > 0.0 && kappa < 1.0)) throw DomainError("kappa must lie in (0, 1)");
  if (!(inner_tol > 0.0) || !(outer_tol > 0.0))
    throw DomainError("tolerances must be positive");
  if (max_outer == 0 || max_inner == 0) throw DomainError("iteration caps must be positive");
  if (lipschitz && !(*lipschitz > 0.0)) throw DomainError("Lipschitz constant must be positive");
}

double SolverState::inner_iterations_mean() const {
  if (inner_iteration_counts.empty()) return 0.0;
  const double total = std::accumulate(inner_iteration_counts.begin(),
                                       inner_iteration_counts.end(), 0.0);
  return total / static_cast<double>(inner_iteration_counts.size());
}

double theta_next(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("theta must lie in (0, 1]");
  return 0.5 * (theta * std::sqrt(theta * theta + 4.0) - theta * theta);
}

double momentum_pi(double theta, double theta_prev) {
  return 1.0 - theta + theta / theta_prev;
}

double gamma_objective(const RegressionProblem& problem, std::span<const double> beta,
                       std::span<const double> lambda) {
  if (beta.size() != problem.X.cols() || lambda.size() != problem.X.cols())
    throw InvalidDimension("gamma_objective: beta/lambda do not match the design");
  const double penalty = gamma_penalty(beta, lambda);
  if (std::isinf(penalty)) return penalty;
  return half_residual_sq(problem.X.multiply(beta), problem.y) + problem.rho * penalty;
}

double lasso_objective(const RegressionProblem& problem, std::span<const double> beta) {
  double l1 = 0.0;
  for (double b : beta) l1 += std::abs(b);
  return half_residual_sq(problem.X.multiply(beta), problem.y) + problem.rho * l1;
}

SolveResult nepio_solve(const RegressionProblem& problem, const ConstraintSet& constraint,
                        const SolverConfig& config) {
  problem.validate();
  config.validate();
  const std::size_t n = problem.X.cols();
  const std::size_t m = problem.X.rows();
  if (constraint.dim() != n)
    throw InvalidDimension("constraint dimension does not match the design columns");

  const auto start = Clock::now();
  const auto& kt = kernels::active();
  const double L = config.lipschitz ? *config.lipschitz : lipschitz_constant(problem.X);
  const double step_rho = problem.rho / L;

  const CompositeMap map(constraint);
  FixedPointSolver inner(map);
  const FixedPointOptions inner_options{config.kappa, config.inner_tol, config.max_inner};

  SolverState s;
  s.lipschitz = L;
  s.beta.assign(n, 0.0);
  s.lambda.assign(n, 1.0);
  s.w_beta = s.beta;
  s.w_lambda = s.lambda;

  // X u and X w are carried alongside u and w; w is affine in (u, u_prev).
  std::vector<double> xu(m, 0.0), xu_prev(m), xw(m, 0.0), residual(m), grad(n), alpha(n);

  double previous = half_residual_sq(xu, problem.y) + problem.rho * gamma_penalty(s.beta, s.lambda);
  s.objective_history.push_back(previous);
  s.theta_history.push_back(s.theta);

  for (s.t = 1; s.t <= config.max_outer; ++s.t) {
    kt.axpby(1.0, xw.data(), -1.0, problem.y.data(), residual.data(), m);
    problem.X.multiply_transpose(residual, grad);
    kt.axpby(1.0, s.w_beta.data(), -1.0 / L, grad.data(), alpha.data(), n);

    const ProxProblem prox{map, alpha, s.w_lambda, step_rho, map.default_c()};
    if (!config.warm_start) std::fill(inner.v().begin(), inner.v().end(), 0.0);
    s.inner_iteration_counts.push_back(inner.solve(prox, inner_options));
    s.inner_all_converged = s.inner_all_converged && inner.converged();

    s.beta_prev.swap(s.beta);
    s.lambda_prev.swap(s.lambda);
    xu_prev.swap(xu);
    s.lambda.assign(inner.lambda().begin(), inner.lambda().end());
    s.beta.resize(n);
    kt.shrink_ratio(alpha.data(), s.lambda.data(), step_rho, s.beta.data(), n);
    xu.resize(m);
    problem.X.multiply(s.beta, xu);

    const double current =
        half_residual_sq(xu, problem.y) + problem.rho * gamma_penalty(s.beta, s.lambda);
    s.objective_history.push_back(current);

    s.theta_prev = s.theta;
    s.theta = theta_next(s.theta);
    s.pi = config.accelerate ? momentum_pi(s.theta, s.theta_prev) : 1.0;
    s.theta_history.push_back(s.theta);
    s.pi_history.push_back(s.pi);

    // w = pi u - (pi - 1) u_prev
    kt.axpby(s.pi, s.beta.data(), 1.0 - s.pi, s.beta_prev.data(), s.w_beta.data(), n);
    kt.axpby(s.pi, s.lambda.data(), 1.0 - s.pi, s.lambda_prev.data(), s.w_lambda.data(), n);
    kt.axpby(s.pi, xu.data(), 1.0 - s.pi, xu_prev.data(), xw.data(), m);

    if (stalled(previous, current, config.outer_tol)) {
      s.converged = true;
      break;
    }
    previous = current;
  }
  if (s.t > config.max_outer) s.t = config.max_outer;
  s.wall_time_ms = elapsed_ms(start);

  SolveResult out;
  out.beta = s.beta;
  out.lambda = s.lambda;
  out.diagnostics = std::move(s);
  return out;
}

LassoResult lasso_fista(const RegressionProblem& problem, const SolverConfig& config) {
  problem.validate();
  config.validate();
  const std::size_t n = problem.X.cols();
  const std::size_t m = problem.X.rows();
  const auto start = Clock::now();
  const auto& kt = kernels::active();
  const double L = config.lipschitz ? *config.lipschitz : lipschitz_constant(problem.X);

  LassoResult out;
  std::vector<double> beta(n, 0.0), beta_prev(n), w(n, 0.0), grad(n), step(n);
  std::vector<double> xb(m, 0.0), xb_prev(m), xw(m, 0.0), residual(m);
  double previous = lasso_objective(problem, beta);
  out.objective_history.push_back(previous);
  double theta = 1.0;

  for (std::size_t t = 1; t <= config.max_outer; ++t) {
    out.iterations = t;
    kt.axpby(1.0, xw.data(), -1.0, problem.y.data(), residual.data(), m);
    problem.X.multiply_transpose(residual, grad);
    kt.axpby(1.0, w.data(), -1.0 / L, grad.data(), step.data(), n);
    beta_prev.swap(beta);
    xb_prev.swap(xb);
    kt.soft_threshold(step.data(), problem.rho / L, beta.data(), n);
    problem.X.multiply(beta, xb);

    double l1 = 0.0;
    for (double b : beta) l1 += std::abs(b);
    const double current = half_residual_sq(xb, problem.y) + problem.rho * l1;
    out.objective_history.push_back(current);

    const double theta_new = theta_next(theta);
    const double pi = config.accelerate ? momentum_pi(theta_new, theta) : 1.0;
    theta = theta_new;
    kt.axpby(pi, beta.data(), 1.0 - pi, beta_prev.data(), w.data(), n);
    kt.axpby(pi, xb.data(), 1.0 - pi, xb_prev.data(), xw.data(), m);

    if (stalled(previous, current, config.outer_tol)) {
      out.converged = true;
      break;
    }
    previous = current;
  }
  out.beta = std::move(beta);
  out.wall_time_ms = elapsed_ms(start);
  return out;
}

}  // namespace sparsity
