#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sparsity {

/// One row of an edge map: e_plus - e_minus.
struct Edge {
  std::size_t plus;
  std::size_t minus;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Sparse signed incidence operator A (k x n). Row e maps a node vector to
/// lambda[plus] - lambda[minus], so constant vectors are in the kernel.
class EdgeMap {
 public:
  EdgeMap() = default;
  EdgeMap(std::size_t nodes, std::vector<Edge> edges);

  std::size_t rows() const { return edges_.size(); }
  std::size_t cols() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }

  /// out = A x. out must have rows() entries.
  void apply(std::span<const double> x, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> x) const;

  /// out += A^T t.
  void add_transpose(std::span<const double> t, std::span<double> out) const;
  std::vector<double> apply_transpose(std::span<const double> t) const;

  /// Largest eigenvalue of A^T A by power iteration: stops after max_iter
  /// iterations or when the Rayleigh quotient changes by less than rel_tol.
  double norm_squared_estimate(int max_iter = 50, double rel_tol = 1e-9) const;

  friend bool operator==(const EdgeMap&, const EdgeMap&) = default;

 private:
  std::size_t nodes_ = 0;
  std::vector<Edge> edges_;
};

/// Chain 0-1-...-(n-1); row i = e_i - e_{i+1}.
EdgeMap grid_edge_map_1d(std::size_t n);

/// rows x cols grid flattened row-major. Horizontal edges first (row by row),
/// then vertical edges; each row is e_lower - e_higher.
EdgeMap grid_edge_map_2d(std::size_t rows, std::size_t cols);

/// parent[i] < 0 or parent[i] == i marks a root. One row per non-root node,
/// e_parent - e_child, so A lambda >= 0 reads lambda_parent >= lambda_child.
EdgeMap tree_edge_map(std::span<const long> parent);

}  // namespace sparsity
