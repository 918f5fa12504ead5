#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "sparsity/edge_map.hpp"

namespace sparsity {

/// Orthonormal 2D Haar transform of a side x side image (row-major), full
/// depth, Mallat layout: the coarsest coefficient sits at (0, 0) and the
/// detail subbands of scale s occupy [0, 2s)^2 minus [0, s)^2.
std::vector<double> haar_forward_2d(std::span<const double> image, std::size_t side);
std::vector<double> haar_inverse_2d(std::span<const double> coeffs, std::size_t side);

/// Quadtree parents in the Mallat layout: parent(i, j) = (i/2, j/2), root (0, 0)
/// marked with -1. Flattened row-major.
std::vector<long> haar_quadtree_parents(std::size_t side);

struct HaarTreeModel {
  std::vector<double> image;
  /// Haar coefficients of the image; the regression target.
  std::vector<double> beta_star;
  std::vector<long> parents;
  EdgeMap tree;
};

/// Synthetic piecewise-constant image built from a few dyadic-aligned squares
/// on a zero background, with its Haar coefficients and quadtree.
/// side must be a power of two in [8, 32].
HaarTreeModel haar_tree_setup(std::size_t side, std::mt19937_64& rng);

bool is_power_of_two(std::size_t v);

}  // namespace sparsity
