#include "sparsity/oracles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sparsity/errors.hpp"

namespace sparsity::oracles {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kInf = std::numeric_limits<double>::infinity();

VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::Map<const RowMajor> as_eigen(const Matrix& X) {
  return {X.data().data(), static_cast<Eigen::Index>(X.rows()),
          static_cast<Eigen::Index>(X.cols())};
}

void clamp_nonneg(VectorXd& v) { v = v.cwiseMax(0.0); }

}  // namespace

// ---------------------------------------------------------------------------
// Projection onto Lambda

struct LambdaProjector::Impl {
  const ConstraintSet& set;
  double tol;
  std::size_t max_iter;
  Eigen::LLT<MatrixXd> llt;
  VectorXd x;  // split variable B lambda, length n + k
  VectorXd u;  // scaled dual
  static constexpr double sigma = 1.0;

  Impl(const ConstraintSet& s, double t, std::size_t cap) : set(s), tol(t), max_iter(cap) {
    const auto n = static_cast<Eigen::Index>(set.dim());
    MatrixXd gram = MatrixXd::Zero(n, n);
    for (const Edge& e : set.edge_map().edges()) {
      const auto p = static_cast<Eigen::Index>(e.plus);
      const auto q = static_cast<Eigen::Index>(e.minus);
      gram(p, p) += 1.0;
      gram(q, q) += 1.0;
      gram(p, q) -= 1.0;
      gram(q, p) -= 1.0;
    }
    MatrixXd system = sigma * gram;
    system.diagonal().array() += 1.0 + sigma;
    llt.compute(system);
    x = VectorXd::Zero(n + static_cast<Eigen::Index>(set.edge_count()));
    u = VectorXd::Zero(x.size());
  }

  VectorXd apply_b(const VectorXd& lambda) const {
    const auto n = lambda.size();
    VectorXd out(x.size());
    out.head(n) = lambda;
    std::span<double> tail(out.data() + n, static_cast<std::size_t>(out.size() - n));
    set.edge_map().apply(std::span<const double>(lambda.data(), static_cast<std::size_t>(n)), tail);
    return out;
  }

  VectorXd apply_bt(const VectorXd& v) const {
    const auto n = static_cast<Eigen::Index>(set.dim());
    VectorXd out = v.head(n);
    set.edge_map().add_transpose(
        std::span<const double>(v.data() + n, static_cast<std::size_t>(v.size() - n)),
        std::span<double>(out.data(), static_cast<std::size_t>(n)));
    return out;
  }

  VectorXd project_product(const VectorXd& point) const {
    const auto n = static_cast<Eigen::Index>(set.dim());
    VectorXd out(point.size());
    out.head(n) = point.head(n).cwiseMax(0.0);
    project_simple(set.simple_set(),
                   std::span<const double>(point.data() + n, static_cast<std::size_t>(point.size() - n)),
                   std::span<double>(out.data() + n, static_cast<std::size_t>(point.size() - n)));
    return out;
  }

  VectorXd project(const VectorXd& z) {
    const double scale = std::max(1.0, z.norm());
    for (std::size_t it = 0; it < max_iter; ++it) {
      const VectorXd lambda = llt.solve(z + sigma * apply_bt(x - u));
      const VectorXd bl = apply_b(lambda);
      const VectorXd x_old = x;
      x = project_product(bl + u);
      u += bl - x;
      const double primal = (bl - x).norm();
      const double dual = sigma * apply_bt(x - x_old).norm();
      if (primal <= tol * scale && dual <= tol * scale) return lambda;
    }
    throw OracleFailure("LambdaProjector: ADMM did not reach tolerance");
  }
};

LambdaProjector::LambdaProjector(const ConstraintSet& constraint, double tol,
                                 std::size_t max_iter)
    : impl_(std::make_unique<Impl>(constraint, tol, max_iter)) {}

LambdaProjector::~LambdaProjector() = default;

std::vector<double> LambdaProjector::project(std::span<const double> z) {
  if (z.size() != impl_->set.dim()) throw InvalidDimension("LambdaProjector: wrong dimension");
  return to_std(impl_->project(to_eigen(z)));
}

// ---------------------------------------------------------------------------
// Prox oracle

BetaLambda prox_oracle(const ProxProblem& problem, const OracleConfig& config) {
  const ConstraintSet& set = problem.map.constraint();
  const std::size_t n = set.dim();
  if (n > 50) throw InvalidDimension("prox_oracle is limited to n <= 50");
  if (problem.alpha.size() != n || problem.mu.size() != n)
    throw InvalidDimension("prox_oracle: dimension mismatch");
  const double rho = problem.rho;
  const VectorXd alpha = to_eigen(problem.alpha);
  const VectorXd mu = to_eigen(problem.mu);
  const VectorXd alpha_sq = alpha.cwiseAbs2();

  const auto objective = [&](const VectorXd& l) {
    return 0.5 * (l - mu).squaredNorm() +
           0.5 * rho * ((alpha_sq.array() / (l.array() + rho)) + l.array()).sum();
  };
  const auto gradient = [&](const VectorXd& l) -> VectorXd {
    return (l - mu).array() +
           0.5 * rho * (1.0 - alpha_sq.array() / (l.array() + rho).square());
  };
  const double lip = 1.0 + alpha_sq.maxCoeff() / (rho * rho);

  LambdaProjector projector(set, 1e-11, config.max_iter);
  const auto run = [&](VectorXd lambda) {
    lambda = to_eigen(projector.project(std::span<const double>(lambda.data(), n)));
    for (std::size_t step = 0; step < config.step_count; ++step) {
      VectorXd next = lambda - gradient(lambda) / lip;
      next = to_eigen(projector.project(std::span<const double>(next.data(), n)));
      const double change = (next - lambda).norm();
      lambda = std::move(next);
      if (change <= 1e-10 * std::max(1.0, lambda.norm())) return lambda;
    }
    throw OracleFailure("prox_oracle: projected gradient did not converge");
  };

  const VectorXd starts[] = {VectorXd::Zero(static_cast<Eigen::Index>(n)), mu,
                             VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 + mu.cwiseAbs().maxCoeff())};
  VectorXd best;
  double best_value = kInf;
  double worst_value = -kInf;
  for (const VectorXd& start : starts) {
    VectorXd candidate = run(start);
    clamp_nonneg(candidate);
    const double value = objective(candidate);
    worst_value = std::max(worst_value, value);
    if (value < best_value) {
      best_value = value;
      best = std::move(candidate);
    }
  }
  if (worst_value - best_value > config.tol * std::max(1.0, std::abs(best_value)) + 1e-12)
    throw OracleFailure("prox_oracle: multi-start disagreement " +
                        std::to_string(worst_value - best_value));

  BetaLambda out;
  out.lambda = to_std(best);
  out.beta = beta_from_lambda(problem.alpha, out.lambda, rho);
  return out;
}

// ---------------------------------------------------------------------------
// Full-problem oracle

namespace {

struct ReducedObjective {
  const Eigen::Map<const RowMajor>& X;
  const VectorXd& y;
  double rho;

  // value, gradient and the solved vector w = M^{-1} y at lambda
  double evaluate(const VectorXd& lambda, VectorXd* grad, VectorXd* w_out = nullptr) const {
    MatrixXd M = (X * lambda.asDiagonal() * X.transpose()) / rho;
    M.diagonal().array() += 1.0;
    const Eigen::LLT<MatrixXd> llt(M);
    const VectorXd w = llt.solve(y);
    if (grad) {
      const VectorXd xtw = X.transpose() * w;
      *grad = (0.5 * rho) - xtw.array().square() / (2.0 * rho);
    }
    if (w_out) *w_out = w;
    return 0.5 * y.dot(w) + 0.5 * rho * lambda.sum();
  }
};

}  // namespace

BetaLambda full_problem_oracle(const RegressionProblem& problem,
                               const ConstraintSet& constraint, const OracleConfig& config) {
  problem.validate();
  const std::size_t n = problem.X.cols();
  if (n > 50 || problem.X.rows() > 100)
    throw InvalidDimension("full_problem_oracle is limited to n <= 50, m <= 100");
  if (constraint.dim() != n) throw InvalidDimension("full_problem_oracle: dimension mismatch");

  const auto X = as_eigen(problem.X);
  const VectorXd y = to_eigen(problem.y);
  const ReducedObjective f{X, y, problem.rho};
  LambdaProjector projector(constraint, 1e-11, config.max_iter);
  const auto project = [&](const VectorXd& z) {
    VectorXd p = to_eigen(projector.project(std::span<const double>(z.data(), n)));
    clamp_nonneg(p);
    return p;
  };

  VectorXd lambda = VectorXd::Ones(static_cast<Eigen::Index>(n));
  VectorXd grad;
  double value = f.evaluate(lambda, &grad);
  VectorXd extrapolated = lambda;
  double momentum = 1.0;
  double step = 1.0;
  double checkpoint = value;
  bool converged = false;

  for (std::size_t it = 1; it <= config.step_count; ++it) {
    VectorXd g_ext;
    const double f_ext = f.evaluate(extrapolated, &g_ext);
    VectorXd candidate;
    double f_cand = kInf;
    for (int bt = 0; bt < 80; ++bt) {
      candidate = project(extrapolated - step * g_ext);
      f_cand = f.evaluate(candidate, nullptr);
      const VectorXd d = candidate - extrapolated;
      if (f_cand <= f_ext + g_ext.dot(d) + d.squaredNorm() / (2.0 * step) + 1e-15 * std::abs(f_ext))
        break;
      step *= 0.5;
    }
    if (f_cand > value) {
      if (momentum == 1.0 && extrapolated == lambda) {
        // A plain projected step from lambda failed: stationary up to the
        // accuracy of the projection. Same step would repeat forever.
        f.evaluate(lambda, &grad);
        const double probe = std::clamp(step, 1e-8, 1.0);
        const double mapping = (lambda - project(lambda - probe * grad)).norm() / probe;
        converged = mapping <= 1e-4 * std::max(1.0, grad.norm());
        break;
      }
      // Function-value restart keeps the sequence monotone.
      extrapolated = lambda;
      momentum = 1.0;
    } else {
      const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      extrapolated = candidate + ((momentum - 1.0) / next_momentum) * (candidate - lambda);
      momentum = next_momentum;
      lambda = std::move(candidate);
      value = f_cand;
      step = std::min(step * 1.1, 1e8);
    }

    if (it % 50 == 0) {
      const bool flat = checkpoint - value <= config.tol * std::max(1.0, std::abs(value));
      checkpoint = value;
      if (flat) {
        f.evaluate(lambda, &grad);
        const double probe = std::clamp(step, 1e-8, 1.0);
        const double mapping = (lambda - project(lambda - probe * grad)).norm() / probe;
        if (mapping <= 1e-6 * std::max(1.0, grad.norm())) {
          converged = true;
          break;
        }
      }
    }
  }
  if (!converged) throw OracleFailure("full_problem_oracle: no convergence");

  VectorXd w;
  f.evaluate(lambda, nullptr, &w);
  const VectorXd xtw = X.transpose() * w;
  BetaLambda out;
  out.lambda = to_std(lambda);
  out.beta = to_std((lambda.array() * xtw.array() / problem.rho).matrix());
  return out;
}

// ---------------------------------------------------------------------------
// Omega

double omega_value(std::span<const double> beta, const ConstraintSet& constraint,
                   const OracleConfig& config) {
  const std::size_t n = beta.size();
  if (n > 50) throw InvalidDimension("omega_value is limited to n <= 50");
  if (constraint.dim() != n) throw InvalidDimension("omega_value: dimension mismatch");
  const VectorXd b = to_eigen(beta);
  const VectorXd b_sq = b.cwiseAbs2();

  const auto value_at = [&](const VectorXd& l) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < l.size(); ++i) {
      if (l(i) > 0.0) total += b_sq(i) / l(i) + l(i);
      else if (b_sq(i) > 0.0 || l(i) < 0.0) return kInf;
    }
    return 0.5 * total;
  };
  const auto gradient = [&](const VectorXd& l) -> VectorXd {
    VectorXd g(l.size());
    for (Eigen::Index i = 0; i < l.size(); ++i)
      g(i) = l(i) > 0.0 ? 0.5 * (1.0 - b_sq(i) / (l(i) * l(i))) : 0.5;
    return g;
  };

  LambdaProjector projector(constraint, 1e-12, config.max_iter);
  VectorXd lambda = VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 + b.cwiseAbs().maxCoeff());
  double value = value_at(lambda);
  double step = 1.0;
  std::size_t flat_steps = 0;
  for (std::size_t it = 0; it < config.step_count; ++it) {
    const VectorXd g = gradient(lambda);
    bool accepted = false;
    for (int bt = 0; bt < 100; ++bt) {
      VectorXd cand = to_eigen(projector.project(
          std::span<const double>(VectorXd(lambda - step * g).data(), n)));
      clamp_nonneg(cand);
      const double v = value_at(cand);
      const VectorXd d = cand - lambda;
      if (v <= value + g.dot(d) + d.squaredNorm() / (2.0 * step)) {
        flat_steps = (value - v <= config.tol * std::max(1.0, value)) ? flat_steps + 1 : 0;
        accepted = v <= value;
        if (accepted) {
          lambda = std::move(cand);
          value = v;
        }
        break;
      }
      step *= 0.5;
    }
    if (!accepted || flat_steps >= 50) return value;
    step *= 1.5;
  }
  throw OracleFailure("omega_value: projected gradient did not settle");
}

// ---------------------------------------------------------------------------
// Lasso references

std::vector<double> lasso_coordinate_descent(const RegressionProblem& problem, double tol,
                                             std::size_t max_sweeps) {
  problem.validate();
  const MatrixXd X = as_eigen(problem.X);
  const VectorXd col_sq = X.colwise().squaredNorm().transpose();
  VectorXd beta = VectorXd::Zero(X.cols());
  VectorXd residual = to_eigen(problem.y);
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (col_sq(j) == 0.0) continue;
      const double z = beta(j) + X.col(j).dot(residual) / col_sq(j);
      const double thr = problem.rho / col_sq(j);
      const double next = std::abs(z) > thr ? std::copysign(std::abs(z) - thr, z) : 0.0;
      const double delta = next - beta(j);
      if (delta != 0.0) {
        residual -= delta * X.col(j);
        beta(j) = next;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change <= tol * std::max(1.0, beta.cwiseAbs().maxCoeff())) return to_std(beta);
  }
  throw OracleFailure("lasso_coordinate_descent: no convergence");
}

double lasso_kkt_violation(const RegressionProblem& problem, std::span<const double> beta) {
  const auto X = as_eigen(problem.X);
  const VectorXd b = to_eigen(beta);
  const VectorXd g = X.transpose() * (X * b - to_eigen(problem.y));
  double worst = 0.0;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    const double v = b(j) == 0.0 ? std::max(0.0, std::abs(g(j)) - problem.rho)
                                 : std::abs(g(j) + problem.rho * (b(j) > 0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst / problem.rho;
}

std::vector<double> l1_projection_by_enumeration(std::span<const double> t, double radius) {
  const std::size_t k = t.size();
  if (k > 12) throw InvalidDimension("enumeration limited to k <= 12");
  double l1 = 0.0;
  for (double v : t) l1 += std::abs(v);
  if (l1 <= radius) return {t.begin(), t.end()};

  std::vector<double> best;
  double best_dist = kInf;
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    double sum_abs = 0.0;
    std::size_t size = 0;
    for (std::size_t i = 0; i < k; ++i)
      if (mask & (1u << i)) {
        sum_abs += std::abs(t[i]);
        ++size;
      }
    // On the face sum_{i in S} sign(t_i) z_i = radius, z_i = 0 off S.
    const double shift = (sum_abs - radius) / static_cast<double>(size);
    std::vector<double> z(k, 0.0);
    bool sign_consistent = true;
    for (std::size_t i = 0; i < k; ++i) {
      if (!(mask & (1u << i))) continue;
      const double mag = std::abs(t[i]) - shift;
      if (mag < 0.0) {
        sign_consistent = false;
        break;
      }
      z[i] = std::copysign(mag, t[i]);
    }
    if (!sign_consistent) continue;
    double dist = 0.0;
    for (std::size_t i = 0; i < k; ++i) dist += (z[i] - t[i]) * (z[i] - t[i]);
    if (dist < best_dist) {
      best_dist = dist;
      best = std::move(z);
    }
  }
  return best;
}

GridMinimum grid_minimize(const std::function<double(double)>& f, double lo, double hi,
                          double step) {
  GridMinimum best{lo, f(lo)};
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 1; i <= count; ++i) {
    const double s = lo + static_cast<double>(i) * step;
    const double v = f(s);
    if (v < best.value) best = {s, v};
  }
  return best;
}

double cubic_prox_objective(double s, double mu, double alpha, double r, double rho) {
  return (s - mu) * (s - mu) + r * (alpha * alpha / (s + rho) + s);
}

GridMinimum scalar_prox_search(double mu, double alpha, double r, double rho, double hi,
                               double step) {
  const auto h = [&](double s) { return cubic_prox_objective(s, mu, alpha, r, rho); };
  const GridMinimum coarse = grid_minimize(h, 0.0, hi, step);
  double a = std::max(0.0, coarse.argmin - step);
  double b = std::min(hi, coarse.argmin + step);
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    const double c = b - ratio * (b - a);
    const double d = a + ratio * (b - a);
    (h(c) < h(d) ? b : a) = (h(c) < h(d) ? d : c);
  }
  GridMinimum out{0.5 * (a + b), h(0.5 * (a + b))};
  if (coarse.value < out.value) out = coarse;
  if (const double h0 = h(0.0); h0 <= out.value) out = {0.0, h0};
  return out;
}

}  // namespace sparsity::oracles
