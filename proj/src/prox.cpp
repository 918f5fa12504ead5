#include "sparsity/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sparsity/errors.hpp"
#include "sparsity/kernels.hpp"

namespace sparsity {

std::vector<double> beta_from_lambda(std::span<const double> alpha,
                                     std::span<const double> lambda, double rho) {
  if (alpha.size() != lambda.size())
    throw InvalidDimension("beta_from_lambda: alpha and lambda differ in length");
  if (!(rho > 0.0)) throw DomainError("beta_from_lambda: rho must be positive");
  for (double l : lambda)
    if (!(l >= 0.0)) throw DomainError("beta_from_lambda: negative lambda component");
  std::vector<double> beta(alpha.size());
  kernels::active().shrink_ratio(alpha.data(), lambda.data(), rho, beta.data(),
                                 alpha.size());
  return beta;
}

void prox_phi1(std::span<const double> s, std::span<const double> alpha, double rho,
               double r, std::span<double> out) {
  if (s.size() != alpha.size() || out.size() != s.size())
    throw InvalidDimension("prox_phi1: dimension mismatch");
  for (std::size_t i = 0; i < s.size(); ++i)
    out[i] = cubic_prox_scalar(s[i], alpha[i], r, rho);
}

std::vector<double> prox_phi1(std::span<const double> s, std::span<const double> alpha,
                              double rho, double r) {
  std::vector<double> out(s.size());
  prox_phi1(s, alpha, rho, r, out);
  return out;
}

CompositeMap::CompositeMap(const ConstraintSet& constraint)
    : constraint_(&constraint),
      norm_sq_(1.0 + 1.01 * constraint.edge_map().norm_squared_estimate()) {}

void CompositeMap::apply(std::span<const double> lambda, std::span<double> out) const {
  const std::size_t n = dim();
  if (lambda.size() != n || out.size() != total_rows())
    throw InvalidDimension("CompositeMap::apply: dimension mismatch");
  std::copy(lambda.begin(), lambda.end(), out.begin());
  edge_map().apply(lambda, out.subspan(n));
}

void CompositeMap::apply_transpose(std::span<const double> v, std::span<double> out) const {
  const std::size_t n = dim();
  if (v.size() != total_rows() || out.size() != n)
    throw InvalidDimension("CompositeMap::apply_transpose: dimension mismatch");
  std::copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n), out.begin());
  edge_map().add_transpose(v.subspan(n), out);
}

void ProxProblem::validate() const {
  const std::size_t n = map.dim();
  if (alpha.size() != n || mu.size() != n)
    throw InvalidDimension("ProxProblem: alpha/mu do not match the constraint dimension");
  if (!(rho > 0.0)) throw DomainError("ProxProblem: rho must be positive");
  if (!(c > 0.0) || c > (2.0 / map.norm_squared_estimate()) * (1.0 + 1e-12))
    throw DomainError("ProxProblem: c outside (0, 2/||B||^2]");
}

void prox_phi(const ProxProblem& problem, std::span<const double> point,
              std::span<double> out) {
  const std::size_t n = problem.map.dim();
  if (point.size() != problem.map.total_rows() || out.size() != point.size())
    throw InvalidDimension("prox_phi: point must have n + k entries");
  prox_phi1(point.first(n), problem.alpha, problem.rho, problem.phi1_weight(),
            out.first(n));
  project_simple(problem.map.constraint().simple_set(), point.subspan(n), out.subspan(n));
}

FixedPointSolver::FixedPointSolver(const CompositeMap& map)
    : map_(&map),
      v_(map.total_rows(), 0.0),
      h_(map.total_rows()),
      next_(map.total_rows()),
      z_(map.total_rows()),
      p_(map.total_rows()),
      g_(map.dim()),
      q_(map.dim()),
      aq_(map.edge_count()),
      lambda_(map.dim(), 0.0) {}

void FixedPointSolver::evaluate(const ProxProblem& problem) {
  const std::size_t n = map_->dim();
  const std::size_t d = map_->total_rows();
  const auto& kt = kernels::active();
  const std::span<const double> v(v_);

  // (I - c B B^T) v + B mu = v + B q with q = mu - c B^T v.
  map_->apply_transpose(v, g_);
  kt.axpby(1.0, problem.mu.data(), -problem.c, g_.data(), q_.data(), n);
  kt.axpby(1.0, v_.data(), 1.0, q_.data(), z_.data(), n);
  map_->edge_map().apply(q_, aq_);
  kt.axpby(1.0, v_.data() + n, 1.0, aq_.data(), z_.data() + n, d - n);

  prox_phi(problem, z_, p_);
  kt.axpby(1.0, z_.data(), -1.0, p_.data(), h_.data(), d);
  std::copy(p_.begin(), p_.begin() + static_cast<std::ptrdiff_t>(n), lambda_.begin());
}

std::size_t FixedPointSolver::solve(const ProxProblem& problem,
                                    const FixedPointOptions& options) {
  problem.validate();
  if (&problem.map != map_) throw InvalidStructure("FixedPointSolver: map mismatch");
  if (!(options.kappa > 0.0 && options.kappa < 1.0))
    throw DomainError("Opial parameter kappa must lie in (0, 1)");
  if (!(options.tol > 0.0)) throw DomainError("fixed-point tolerance must be positive");

  const auto& kt = kernels::active();
  converged_ = false;
  std::size_t it = 0;
  while (it < options.max_iter) {
    evaluate(problem);
    const kernels::StepNorms norms =
        kt.opial_step(options.kappa, v_.data(), h_.data(), next_.data(), v_.size());
    ++it;
    residual_ = std::sqrt(norms.diff_sq) / std::max(std::sqrt(norms.prev_sq), 1e-12);
    v_.swap(next_);
    if (residual_ <= options.tol) {
      converged_ = true;
      break;
    }
  }
  return it;
}

void fixed_point_map(const ProxProblem& problem, std::span<const double> v,
                     std::span<double> out, std::span<double> lambda_out) {
  problem.validate();
  FixedPointSolver solver(problem.map);
  if (v.size() != solver.v().size() || out.size() != v.size())
    throw InvalidDimension("fixed_point_map: v must have n + k entries");
  std::copy(v.begin(), v.end(), solver.v().begin());
  solver.evaluate(problem);
  std::copy(solver.h().begin(), solver.h().end(), out.begin());
  if (!lambda_out.empty()) {
    if (lambda_out.size() != problem.map.dim())
      throw InvalidDimension("fixed_point_map: lambda_out must have n entries");
    std::copy(solver.lambda().begin(), solver.lambda().end(), lambda_out.begin());
  }
}

FixedPointState picard_opial_fixed_point(const ProxProblem& problem,
                                         std::span<const double> v0,
                                         const FixedPointOptions& options) {
  FixedPointSolver solver(problem.map);
  if (v0.size() != solver.v().size())
    throw InvalidDimension("picard_opial_fixed_point: v0 must have n + k entries");
  std::copy(v0.begin(), v0.end(), solver.v().begin());
  FixedPointState state;
  state.iterations = solver.solve(problem, options);
  state.residual = solver.residual();
  state.converged = solver.converged();
  state.v.assign(solver.v().begin(), solver.v().end());
  state.lambda.assign(solver.lambda().begin(), solver.lambda().end());
  return state;
}

ProxResult prox_gamma(const ProxProblem& problem, const FixedPointOptions& options,
                      std::optional<std::span<const double>> warm_start) {
  std::vector<double> v0(problem.map.total_rows(), 0.0);
  if (warm_start) {
    if (warm_start->size() != v0.size())
      throw InvalidDimension("prox_gamma: warm start must have n + k entries");
    std::copy(warm_start->begin(), warm_start->end(), v0.begin());
  }
  ProxResult out;
  out.state = picard_opial_fixed_point(problem, v0, options);
  out.lambda = out.state.lambda;
  out.beta = beta_from_lambda(problem.alpha, out.lambda, problem.rho);
  return out;
}

double gamma_penalty(std::span<const double> beta, std::span<const double> lambda) {
  if (beta.size() != lambda.size())
    throw InvalidDimension("gamma_penalty: beta and lambda differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (lambda[i] > 0.0) {
      total += beta[i] * beta[i] / lambda[i] + lambda[i];
    } else if (lambda[i] < 0.0 || beta[i] != 0.0) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return 0.5 * total;
}

double prox_objective(std::span<const double> alpha, std::span<const double> mu,
                      double rho, std::span<const double> beta,
                      std::span<const double> lambda) {
  double dist = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    dist += (beta[i] - alpha[i]) * (beta[i] - alpha[i]);
    dist += (lambda[i] - mu[i]) * (lambda[i] - mu[i]);
  }
  return 0.5 * dist + rho * gamma_penalty(beta, lambda);
}

}  // namespace sparsity
