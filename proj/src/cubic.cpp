#include <algorithm>
#include <cmath>
#include <numbers>

#include "sparsity/errors.hpp"
#include "sparsity/prox.hpp"

namespace sparsity {

double largest_real_root(double b, double c, double d) {
  const double shift = -b / 3.0;
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const double disc = 0.25 * q * q + p * p * p / 27.0;

  double y;
  if (disc > 0.0) {
    // One real root. Pick the cube-root branch that avoids cancellation.
    const double a = -std::copysign(std::cbrt(0.5 * std::abs(q) + std::sqrt(disc)), q);
    y = a != 0.0 ? a - p / (3.0 * a) : 0.0;
  } else if (p < 0.0) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    y = m * std::cos(std::acos(arg) / 3.0);
  } else {
    y = 0.0;  // p = q = 0: triple root
  }

  double x = y + shift;
  for (int it = 0; it < 2; ++it) {
    const double f = ((x + b) * x + c) * x + d;
    const double df = (3.0 * x + 2.0 * b) * x + c;
    if (df == 0.0 || !std::isfinite(df)) break;
    const double step = f / df;
    if (!std::isfinite(step)) break;
    x -= step;
  }
  return x;
}

namespace {

// Unique root above lo of an increasing-on-(lo, inf) cubic with f(lo) < 0.
template <class F>
double bracketed_root(F f, double lo, double hi_guess) {
  double hi = std::max(hi_guess, 2.0 * lo + 1.0);
  while (f(hi) <= 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double cubic_prox_scalar(double mu, double alpha, double r, double rho) {
  if (!(r > 0.0) || !(rho > 0.0))
    throw DomainError("cubic_prox_scalar: r and rho must be positive");
  // p(x) = 2x^3 + a2 x^2 - k with x = s + rho; sign p(x) = sign h'(x - rho).
  const double a2 = r - 2.0 * (mu + rho);
  const double k = r * alpha * alpha;
  const auto poly = [&](double x) { return (2.0 * x + a2) * x * x - k; };

  if (poly(rho) >= 0.0) return 0.0;  // h'(0) >= 0: minimum at the boundary

  double x0 = largest_real_root(0.5 * a2, 0.0, -0.5 * k);
  const double scale = 2.0 * std::abs(x0 * x0 * x0) + std::abs(a2) * x0 * x0 + k;
  if (!std::isfinite(x0) || x0 <= rho || std::abs(poly(x0)) > 1e-10 * scale)
    x0 = bracketed_root(poly, rho, mu + rho + 0.5 * r + std::abs(alpha) + 1.0);
  return std::max(x0 - rho, 0.0);
}

}  // namespace sparsity
