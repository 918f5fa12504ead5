#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sparsity/constraint_set.hpp"

namespace sparsity {

/// Largest real root of the monic cubic x^3 + b x^2 + c x + d. Closed form
/// (trigonometric branch for three real roots, Cardano otherwise) followed by
/// two Newton steps.
double largest_real_root(double b, double c, double d);

/// argmin over s >= 0 of h(s) = (s - mu)^2 + r (alpha^2 / (s + rho) + s).
/// The minimizer is (x0 - rho)_+ with x0 the largest real root of
/// 2x^3 + (r - 2(mu + rho)) x^2 - r alpha^2.
double cubic_prox_scalar(double mu, double alpha, double r, double rho);

/// beta_i = alpha_i lambda_i / (lambda_i + rho); exact zero where lambda_i = 0.
/// Throws DomainError on a negative lambda component.
std::vector<double> beta_from_lambda(std::span<const double> alpha,
                                     std::span<const double> lambda, double rho);

/// Componentwise cubic_prox_scalar(s_i, alpha_i, r, rho): the prox of
/// (r/2) sum_i (alpha_i^2 / (s_i + rho) + s_i) over the closed orthant.
std::vector<double> prox_phi1(std::span<const double> s, std::span<const double> alpha,
                              double rho, double r);
void prox_phi1(std::span<const double> s, std::span<const double> alpha, double rho,
               double r, std::span<double> out);

/// B = [I; A] as a (n + k) x n operator together with the estimate of ||B||^2
/// used to pick the step constant c.
class CompositeMap {
 public:
  explicit CompositeMap(const ConstraintSet& constraint);

  const ConstraintSet& constraint() const { return *constraint_; }
  const EdgeMap& edge_map() const { return constraint_->edge_map(); }
  std::size_t dim() const { return constraint_->dim(); }
  std::size_t edge_count() const { return constraint_->edge_count(); }
  std::size_t total_rows() const { return dim() + edge_count(); }

  /// 1 + 1.01 * (power-iteration estimate of ||A||^2).
  double norm_squared_estimate() const { return norm_sq_; }
  /// c = 1 / ||B||^2 estimate; inside the nonexpansive range (0, 2/||B||^2].
  double default_c() const { return 1.0 / norm_sq_; }

  /// out = B lambda (length n + k).
  void apply(std::span<const double> lambda, std::span<double> out) const;
  /// out = B^T v = v_s + A^T v_t (length n).
  void apply_transpose(std::span<const double> v, std::span<double> out) const;

 private:
  const ConstraintSet* constraint_;
  double norm_sq_;
};

/// One instance of the prox of rho*Gamma over R^n x Lambda at (alpha, mu),
/// with fixed-point constant c. Non-owning view; the map and the vectors must
/// outlive it.
struct ProxProblem {
  const CompositeMap& map;
  std::span<const double> alpha;
  std::span<const double> mu;
  double rho;
  double c;

  /// Throws on dimension mismatch, rho <= 0, or c outside (0, 2/||B||^2].
  void validate() const;
  /// Weight r of the scalar prox inside prox_{phi/c}.
  double phi1_weight() const { return rho / c; }
};

/// prox_{phi/c} evaluated blockwise: s' = prox_phi1(s) with weight r = rho/c,
/// t' = projection of t onto S. point has n + k entries.
void prox_phi(const ProxProblem& problem, std::span<const double> point,
              std::span<double> out);

/// out = H(v) = (I - prox_{phi/c})((I - c B B^T) v + B mu). When lambda_out is
/// non-empty it receives the s-block of the prox evaluation.
void fixed_point_map(const ProxProblem& problem, std::span<const double> v,
                     std::span<double> out, std::span<double> lambda_out = {});

struct FixedPointState {
  std::vector<double> v;
  std::size_t iterations = 0;
  /// ||v_{s+1} - v_s|| / max(||v_s||, 1e-12) at the last step.
  double residual = 0.0;
  bool converged = false;
  /// s-block of prox_{phi/c} at the last evaluation of H; this is the
  /// recovered lambda (nonnegative, exact zeros).
  std::vector<double> lambda;
};

struct FixedPointOptions {
  double kappa = 0.2;
  double tol = 1e-2;
  std::size_t max_iter = 10000;
};

/// Opial-averaged Picard iteration v_{s+1} = kappa v_s + (1 - kappa) H(v_s),
/// stopped on relative change <= tol. Hitting max_iter returns the state with
/// converged = false.
FixedPointState picard_opial_fixed_point(const ProxProblem& problem,
                                         std::span<const double> v0,
                                         const FixedPointOptions& options = {});

struct ProxResult {
  std::vector<double> beta;
  std::vector<double> lambda;
  FixedPointState state;
};

/// argmin 1/2 ||(beta, lambda) - (alpha, mu)||^2 + rho Gamma(beta, lambda)
/// over R^n x Lambda. warm_start (length n + k) seeds the fixed-point iterate;
/// zeros otherwise.
ProxResult prox_gamma(const ProxProblem& problem, const FixedPointOptions& options = {},
                      std::optional<std::span<const double>> warm_start = std::nullopt);

/// Objective of the joint prox problem at (beta, lambda); +inf when some
/// lambda_i = 0 with beta_i != 0.
double prox_objective(std::span<const double> alpha, std::span<const double> mu,
                      double rho, std::span<const double> beta,
                      std::span<const double> lambda);

/// Gamma(beta, lambda) = 1/2 sum (beta_i^2 / lambda_i + lambda_i), with
/// 0/0 = 0 and b/0 = +inf.
double gamma_penalty(std::span<const double> beta, std::span<const double> lambda);

/// Reusable buffers for repeated fixed-point solves of the same size.
class FixedPointSolver {
 public:
  explicit FixedPointSolver(const CompositeMap& map);

  /// Runs from the current iterate (zeros initially, or the previous result).
  /// Returns the iteration count; results are read through the accessors.
  std::size_t solve(const ProxProblem& problem, const FixedPointOptions& options);

  /// Evaluates H at the current iterate without advancing it; see h().
  void evaluate(const ProxProblem& problem);

  std::span<const double> v() const { return v_; }
  std::span<double> v() { return v_; }
  std::span<const double> h() const { return h_; }
  std::span<const double> lambda() const { return lambda_; }
  double residual() const { return residual_; }
  bool converged() const { return converged_; }

 private:
  const CompositeMap* map_;
  std::vector<double> v_, h_, next_, z_, p_, g_, q_, aq_, lambda_;
  double residual_ = 0.0;
  bool converged_ = false;
};

}  // namespace sparsity
