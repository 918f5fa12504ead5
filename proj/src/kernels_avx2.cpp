// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "sparsity/kernels.hpp"

#include <immintrin.h>

#include <algorithm>

namespace sparsity::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
  }
  for (; i + 4 <= n; i += 4)
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void axpby_avx2(double a, const double* x, double b, const double* y,
                double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), t));
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void gemv_avx2(const double* X, std::size_t rows, std::size_t cols,
               const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(X + r * cols, x, cols);
}

void gemv_t_avx2(const double* X, std::size_t rows, std::size_t cols,
                 const double* r, double* g) {
  std::fill(g, g + cols, 0.0);
  std::size_t i = 0;
  // Four rows per sweep so g is streamed once per block instead of per row.
  for (; i + 4 <= rows; i += 4) {
    const double* x0 = X + i * cols;
    const double* x1 = x0 + cols;
    const double* x2 = x1 + cols;
    const double* x3 = x2 + cols;
    const __m256d r0 = _mm256_set1_pd(r[i]);
    const __m256d r1 = _mm256_set1_pd(r[i + 1]);
    const __m256d r2 = _mm256_set1_pd(r[i + 2]);
    const __m256d r3 = _mm256_set1_pd(r[i + 3]);
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      __m256d acc = _mm256_loadu_pd(g + j);
      acc = _mm256_fmadd_pd(r0, _mm256_loadu_pd(x0 + j), acc);
      acc = _mm256_fmadd_pd(r1, _mm256_loadu_pd(x1 + j), acc);
      acc = _mm256_fmadd_pd(r2, _mm256_loadu_pd(x2 + j), acc);
      acc = _mm256_fmadd_pd(r3, _mm256_loadu_pd(x3 + j), acc);
      _mm256_storeu_pd(g + j, acc);
    }
    for (; j < cols; ++j)
      g[j] += r[i] * x0[j] + r[i + 1] * x1[j] + r[i + 2] * x2[j] + r[i + 3] * x3[j];
  }
  for (; i < rows; ++i) axpy_avx2(r[i], X + i * cols, g, cols);
}

StepNorms opial_step_avx2(double kappa, const double* v, const double* h,
                          double* v_new, std::size_t n) {
  const __m256d vk = _mm256_set1_pd(kappa);
  const __m256d vw = _mm256_set1_pd(1.0 - kappa);
  __m256d dsq = _mm256_setzero_pd();
  __m256d psq = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vi = _mm256_loadu_pd(v + i);
    const __m256d next = _mm256_fmadd_pd(vk, vi, _mm256_mul_pd(vw, _mm256_loadu_pd(h + i)));
    const __m256d d = _mm256_sub_pd(next, vi);
    dsq = _mm256_fmadd_pd(d, d, dsq);
    psq = _mm256_fmadd_pd(vi, vi, psq);
    _mm256_storeu_pd(v_new + i, next);
  }
  StepNorms out{hsum(dsq), hsum(psq)};
  const double w = 1.0 - kappa;
  for (; i < n; ++i) {
    const double next = kappa * v[i] + w * h[i];
    const double d = next - v[i];
    out.diff_sq += d * d;
    out.prev_sq += v[i] * v[i];
    v_new[i] = next;
  }
  return out;
}

void soft_threshold_avx2(const double* x, double thr, double* out,
                         std::size_t n) {
  const __m256d sign_bit = _mm256_set1_pd(-0.0);
  const __m256d vt = _mm256_set1_pd(thr);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d mag = _mm256_sub_pd(_mm256_andnot_pd(sign_bit, xi), vt);
    const __m256d keep = _mm256_cmp_pd(mag, zero, _CMP_GT_OQ);
    const __m256d signed_mag = _mm256_or_pd(mag, _mm256_and_pd(sign_bit, xi));
    _mm256_storeu_pd(out + i, _mm256_and_pd(keep, signed_mag));
  }
  for (; i < n; ++i) {
    const double mag = (x[i] < 0 ? -x[i] : x[i]) - thr;
    out[i] = mag > 0.0 ? (x[i] < 0 ? -mag : mag) : 0.0;
  }
}

void clamp_nonneg_avx2(const double* x, double* out, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(out + i, _mm256_and_pd(_mm256_cmp_pd(xi, zero, _CMP_GT_OQ), xi));
  }
  for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void shrink_ratio_avx2(const double* alpha, const double* lambda, double rho,
                       double* out, std::size_t n) {
  const __m256d vr = _mm256_set1_pd(rho);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d li = _mm256_loadu_pd(lambda + i);
    const __m256d pos = _mm256_cmp_pd(li, zero, _CMP_GT_OQ);
    const __m256d q = _mm256_div_pd(_mm256_mul_pd(_mm256_loadu_pd(alpha + i), li),
                                    _mm256_add_pd(li, vr));
    _mm256_storeu_pd(out + i, _mm256_and_pd(pos, q));
  }
  for (; i < n; ++i)
    out[i] = lambda[i] > 0.0 ? alpha[i] * lambda[i] / (lambda[i] + rho) : 0.0;
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{
      "avx2",          dot_avx2,           axpy_avx2,
      axpby_avx2,      gemv_avx2,          gemv_t_avx2,
      opial_step_avx2, soft_threshold_avx2, clamp_nonneg_avx2,
      shrink_ratio_avx2,
  };
  return &table;
}

}  // namespace sparsity::kernels
