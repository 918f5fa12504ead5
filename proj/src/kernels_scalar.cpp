#include "sparsity/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace sparsity::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpby_scalar(double a, const double* x, double b, const double* y,
                  double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void gemv_scalar(const double* X, std::size_t rows, std::size_t cols,
                 const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(X + r * cols, x, cols);
}

void gemv_t_scalar(const double* X, std::size_t rows, std::size_t cols,
                   const double* r, double* g) {
  std::fill(g, g + cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) axpy_scalar(r[i], X + i * cols, g, cols);
}

StepNorms opial_step_scalar(double kappa, const double* v, const double* h,
                            double* v_new, std::size_t n) {
  StepNorms out;
  const double w = 1.0 - kappa;
  for (std::size_t i = 0; i < n; ++i) {
    const double next = kappa * v[i] + w * h[i];
    const double d = next - v[i];
    out.diff_sq += d * d;
    out.prev_sq += v[i] * v[i];
    v_new[i] = next;
  }
  return out;
}

void soft_threshold_scalar(const double* x, double thr, double* out,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double mag = std::abs(x[i]) - thr;
    out[i] = mag > 0.0 ? std::copysign(mag, x[i]) : 0.0;
  }
}

void clamp_nonneg_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void shrink_ratio_scalar(const double* alpha, const double* lambda, double rho,
                         double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lambda[i] > 0.0 ? alpha[i] * lambda[i] / (lambda[i] + rho) : 0.0;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      "scalar",          dot_scalar,           axpy_scalar,
      axpby_scalar,      gemv_scalar,          gemv_t_scalar,
      opial_step_scalar, soft_threshold_scalar, clamp_nonneg_scalar,
      shrink_ratio_scalar,
  };
  return table;
}

}  // namespace sparsity::kernels
