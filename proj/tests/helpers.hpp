#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "sparsity/matrix.hpp"

namespace testing_util {

inline std::vector<double> uniform_vector(std::mt19937_64& rng, std::size_t n, double lo,
                                          double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

inline sparsity::Matrix gaussian_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> dist(0.0, 1.0);
  sparsity::Matrix X(rows, cols);
  for (double& x : X.data()) x = dist(rng);
  return X;
}

inline double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double l2(const std::vector<double>& a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

}  // namespace testing_util
