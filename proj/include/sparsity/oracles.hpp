#pragma once

// Slow, independent reference solvers. They are linked into the tests and the
// fixture generator only; nothing in the library depends on them.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "sparsity/constraint_set.hpp"
#include "sparsity/prox.hpp"
#include "sparsity/solver.hpp"

namespace sparsity::oracles {

struct OracleConfig {
  /// Cap on projected-gradient steps.
  std::size_t step_count = 200000;
  /// Target accuracy (objective agreement across starts, stationarity).
  double tol = 1e-9;
  /// Cap on iterations of the inner projection onto Lambda.
  std::size_t max_iter = 100000;
  /// Step of scalar grid searches.
  double grid_resolution = 1e-4;
};

struct BetaLambda {
  std::vector<double> beta;
  std::vector<double> lambda;
};

/// Euclidean projection onto Lambda = {lambda >= 0 : A lambda in S} by ADMM on
/// the split B lambda = x in R^n_+ x S. Keeps its dual state between calls so
/// nearby points project quickly. Throws OracleFailure past max_iter.
class LambdaProjector {
 public:
  LambdaProjector(const ConstraintSet& constraint, double tol = 1e-10,
                  std::size_t max_iter = 100000);
  ~LambdaProjector();
  LambdaProjector(const LambdaProjector&) = delete;
  LambdaProjector& operator=(const LambdaProjector&) = delete;

  std::vector<double> project(std::span<const double> z);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Minimizes the reduced prox objective over Lambda by projected gradient
/// (exact projections), multi-started; beta from the closed-form shrinkage.
/// The constant c of the problem is ignored.
BetaLambda prox_oracle(const ProxProblem& problem, const OracleConfig& config = {});

/// Minimizes 1/2||X beta - y||^2 + rho Gamma over R^n x Lambda: beta is
/// eliminated exactly for each lambda (ridge solve with weights lambda / rho)
/// and lambda is found by accelerated projected gradient with backtracking.
BetaLambda full_problem_oracle(const RegressionProblem& problem,
                               const ConstraintSet& constraint,
                               const OracleConfig& config = {});

/// Upper estimate of inf { Gamma(beta, lambda) : lambda in Lambda } by
/// projected gradient with backtracking from a strictly positive feasible start.
double omega_value(std::span<const double> beta, const ConstraintSet& constraint,
                   const OracleConfig& config = {});

/// Lasso by exact cyclic coordinate descent.
std::vector<double> lasso_coordinate_descent(const RegressionProblem& problem,
                                             double tol = 1e-13,
                                             std::size_t max_sweeps = 1000000);

/// Largest violation of the Lasso subgradient optimality conditions
/// |x_j^T r| <= rho (beta_j = 0), x_j^T r = -rho sign(beta_j) otherwise, with
/// r = X beta - y. Scaled by 1 / rho.
double lasso_kkt_violation(const RegressionProblem& problem, std::span<const double> beta);

/// Projection onto the L1 ball by enumerating supports and sign patterns
/// (k <= 12). Independent of the sort-and-threshold routine.
std::vector<double> l1_projection_by_enumeration(std::span<const double> t, double radius);

struct GridMinimum {
  double argmin;
  double value;
};

/// Minimum of f on {lo, lo + step, ..., hi}.
GridMinimum grid_minimize(const std::function<double(double)>& f, double lo, double hi,
                          double step);

/// h(s) = (s - mu)^2 + r (alpha^2 / (s + rho) + s).
double cubic_prox_objective(double s, double mu, double alpha, double r, double rho);

/// Coarse grid scan followed by golden-section refinement on the bracketing
/// cell; minimizes h over [0, hi]. Independent of the cubic root formula.
GridMinimum scalar_prox_search(double mu, double alpha, double r, double rho,
                               double hi = 20.0, double step = 1e-3);

}  // namespace sparsity::oracles
