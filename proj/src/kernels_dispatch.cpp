#include "sparsity/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <string_view>

namespace sparsity::kernels {

#ifndef SPARSITY_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("SPARSITY_KERNELS");
      env != nullptr && std::string_view(env) == "scalar")
    return scalar_table();
  if (const KernelTable* t = avx2_table(); t != nullptr && cpu_has_avx2())
    return *t;
  return scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

double squared_norm(std::span<const double> x) {
  return active().dot(x.data(), x.data(), x.size());
}

double norm(std::span<const double> x) { return std::sqrt(squared_norm(x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}

}  // namespace sparsity::kernels
