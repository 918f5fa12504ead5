#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace sparsity::kernels {

/// Sum of squares of (v_new - v) and of v, produced by the fused Opial step.
struct StepNorms {
  double diff_sq = 0.0;
  double prev_sq = 0.0;
};

/// Table of the data-parallel inner loops. Every variant must agree with the
/// scalar reference to rounding (reductions may differ in summation order).
///
/// Matrices are dense row-major with `rows * cols` entries.
struct KernelTable {
  std::string_view name;

  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out = a * x + b * y
  void (*axpby)(double a, const double* x, double b, const double* y,
                double* out, std::size_t n);
  // y = X x
  void (*gemv)(const double* X, std::size_t rows, std::size_t cols,
               const double* x, double* y);
  // g = X^T r
  void (*gemv_t)(const double* X, std::size_t rows, std::size_t cols,
                 const double* r, double* g);
  // v_new = kappa * v + (1 - kappa) * h
  StepNorms (*opial_step)(double kappa, const double* v, const double* h,
                          double* v_new, std::size_t n);
  // out_i = sign(x_i) * max(|x_i| - thr, 0)
  void (*soft_threshold)(const double* x, double thr, double* out,
                         std::size_t n);
  // out_i = max(x_i, 0)
  void (*clamp_nonneg)(const double* x, double* out, std::size_t n);
  // out_i = alpha_i * lambda_i / (lambda_i + rho)
  void (*shrink_ratio)(const double* alpha, const double* lambda, double rho,
                       double* out, std::size_t n);
};

const KernelTable& scalar_table();

/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();

/// True when the running CPU reports AVX2 and FMA.
bool cpu_has_avx2();

/// Kernel table chosen once per process: AVX2 when compiled and supported,
/// scalar otherwise. `SPARSITY_KERNELS=scalar` in the environment forces the
/// reference path.
const KernelTable& active();

// Span conveniences over the active table.
double dot(std::span<const double> x, std::span<const double> y);
double squared_norm(std::span<const double> x);
double norm(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);

}  // namespace sparsity::kernels
