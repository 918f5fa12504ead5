#include "sparsity/haar.hpp"

#include <cmath>

#include "sparsity/errors.hpp"

namespace sparsity {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_side(std::size_t side, std::size_t size) {
  if (!is_power_of_two(side)) throw InvalidDimension("Haar transform needs a power-of-two side");
  if (size != side * side) throw InvalidDimension("Haar transform: buffer is not side x side");
}

// One analysis step along a strided line of length len.
void analyze(double* x, std::size_t len, std::size_t stride, std::vector<double>& tmp) {
  const std::size_t half = len / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const double a = x[2 * i * stride], b = x[(2 * i + 1) * stride];
    tmp[i] = (a + b) * kInvSqrt2;
    tmp[half + i] = (a - b) * kInvSqrt2;
  }
  for (std::size_t i = 0; i < len; ++i) x[i * stride] = tmp[i];
}

void synthesize(double* x, std::size_t len, std::size_t stride, std::vector<double>& tmp) {
  const std::size_t half = len / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const double a = x[i * stride], d = x[(half + i) * stride];
    tmp[2 * i] = (a + d) * kInvSqrt2;
    tmp[2 * i + 1] = (a - d) * kInvSqrt2;
  }
  for (std::size_t i = 0; i < len; ++i) x[i * stride] = tmp[i];
}

}  // namespace

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::vector<double> haar_forward_2d(std::span<const double> image, std::size_t side) {
  check_side(side, image.size());
  std::vector<double> out(image.begin(), image.end());
  std::vector<double> tmp(side);
  for (std::size_t len = side; len >= 2; len /= 2) {
    for (std::size_t r = 0; r < len; ++r) analyze(out.data() + r * side, len, 1, tmp);
    for (std::size_t c = 0; c < len; ++c) analyze(out.data() + c, len, side, tmp);
  }
  return out;
}

std::vector<double> haar_inverse_2d(std::span<const double> coeffs, std::size_t side) {
  check_side(side, coeffs.size());
  std::vector<double> out(coeffs.begin(), coeffs.end());
  std::vector<double> tmp(side);
  for (std::size_t len = 2; len <= side; len *= 2) {
    for (std::size_t c = 0; c < len; ++c) synthesize(out.data() + c, len, side, tmp);
    for (std::size_t r = 0; r < len; ++r) synthesize(out.data() + r * side, len, 1, tmp);
  }
  return out;
}

std::vector<long> haar_quadtree_parents(std::size_t side) {
  if (!is_power_of_two(side)) throw InvalidDimension("quadtree needs a power-of-two side");
  std::vector<long> parent(side * side);
  for (std::size_t i = 0; i < side; ++i)
    for (std::size_t j = 0; j < side; ++j)
      parent[i * side + j] = static_cast<long>((i / 2) * side + j / 2);
  parent[0] = -1;
  return parent;
}

HaarTreeModel haar_tree_setup(std::size_t side, std::mt19937_64& rng) {
  if (!is_power_of_two(side) || side < 8 || side > 32)
    throw InvalidDimension("haar_tree_setup: side must be 8, 16 or 32");
  HaarTreeModel model;
  model.image.assign(side * side, 0.0);

  std::uniform_int_distribution<int> count_dist(2, 3);
  std::uniform_real_distribution<double> magnitude(1.0, 2.0);
  std::bernoulli_distribution sign(0.5);
  const int blocks = count_dist(rng);
  for (int b = 0; b < blocks; ++b) {
    // Squares of side/4 or side/8, aligned to their own size.
    const std::size_t block = side / (sign(rng) ? 4 : 8);
    std::uniform_int_distribution<std::size_t> cell(0, side / block - 1);
    const std::size_t r0 = cell(rng) * block, c0 = cell(rng) * block;
    const double value = sign(rng) ? magnitude(rng) : -magnitude(rng);
    for (std::size_t r = r0; r < r0 + block; ++r)
      for (std::size_t c = c0; c < c0 + block; ++c) model.image[r * side + c] += value;
  }

  model.beta_star = haar_forward_2d(model.image, side);
  // Exact zeros where the transform cancels up to rounding.
  for (double& v : model.beta_star)
    if (std::abs(v) < 1e-12) v = 0.0;
  model.parents = haar_quadtree_parents(side);
  model.tree = tree_edge_map(model.parents);
  return model;
}

}  // namespace sparsity
