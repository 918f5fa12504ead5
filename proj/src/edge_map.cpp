#include "sparsity/edge_map.hpp"

#include <cmath>
#include <random>
#include <string>

#include "sparsity/errors.hpp"
#include "sparsity/kernels.hpp"

namespace sparsity {

EdgeMap::EdgeMap(std::size_t nodes, std::vector<Edge> edges)
    : nodes_(nodes), edges_(std::move(edges)) {
  for (const Edge& e : edges_) {
    if (e.plus >= nodes_ || e.minus >= nodes_)
      throw InvalidStructure("edge endpoint out of range");
    if (e.plus == e.minus) throw InvalidStructure("self-loop edge");
  }
}

void EdgeMap::apply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != nodes_ || out.size() != edges_.size())
    throw InvalidDimension("EdgeMap::apply: dimension mismatch");
  for (std::size_t e = 0; e < edges_.size(); ++e)
    out[e] = x[edges_[e].plus] - x[edges_[e].minus];
}

std::vector<double> EdgeMap::apply(std::span<const double> x) const {
  std::vector<double> out(edges_.size());
  apply(x, out);
  return out;
}

void EdgeMap::add_transpose(std::span<const double> t,
                            std::span<double> out) const {
  if (t.size() != edges_.size() || out.size() != nodes_)
    throw InvalidDimension("EdgeMap::add_transpose: dimension mismatch");
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    out[edges_[e].plus] += t[e];
    out[edges_[e].minus] -= t[e];
  }
}

std::vector<double> EdgeMap::apply_transpose(std::span<const double> t) const {
  std::vector<double> out(nodes_, 0.0);
  add_transpose(t, out);
  return out;
}

double EdgeMap::norm_squared_estimate(int max_iter, double rel_tol) const {
  if (edges_.empty()) return 0.0;
  std::mt19937_64 gen(0x5eed);
  std::normal_distribution<double> gauss;
  std::vector<double> x(nodes_);
  for (double& v : x) v = gauss(gen);
  std::vector<double> ax(edges_.size());
  double estimate = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const double nx = kernels::norm(x);
    if (nx == 0.0) break;
    for (double& v : x) v /= nx;
    apply(x, ax);
    const double next = kernels::squared_norm(ax);  // Rayleigh quotient of A^T A
    std::fill(x.begin(), x.end(), 0.0);
    add_transpose(ax, x);
    const bool done = it > 0 && std::abs(next - estimate) <= rel_tol * next;
    estimate = next;
    if (done) break;
  }
  return estimate;
}

EdgeMap grid_edge_map_1d(std::size_t n) {
  if (n < 2) throw InvalidDimension("1D grid needs n >= 2, got " + std::to_string(n));
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return EdgeMap(n, std::move(edges));
}

EdgeMap grid_edge_map_2d(std::size_t rows, std::size_t cols) {
  if (rows < 1 || cols < 1 || rows * cols < 2)
    throw InvalidDimension("2D grid needs rows, cols >= 1 and at least two cells");
  std::vector<Edge> edges;
  edges.reserve(rows * (cols - 1) + (rows - 1) * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c + 1 < cols; ++c)
      edges.push_back({r * cols + c, r * cols + c + 1});
  for (std::size_t r = 0; r + 1 < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      edges.push_back({r * cols + c, (r + 1) * cols + c});
  return EdgeMap(rows * cols, std::move(edges));
}

EdgeMap tree_edge_map(std::span<const long> parent) {
  const std::size_t n = parent.size();
  const auto is_root = [&](std::size_t i) {
    return parent[i] < 0 || static_cast<std::size_t>(parent[i]) == i;
  };
  for (std::size_t i = 0; i < n; ++i)
    if (!is_root(i) && static_cast<std::size_t>(parent[i]) >= n)
      throw InvalidStructure("parent index out of range at node " + std::to_string(i));

  // 0 = unvisited, 1 = on the current path, 2 = known to reach a root.
  std::vector<unsigned char> state(n, 0);
  std::vector<std::size_t> path;
  for (std::size_t start = 0; start < n; ++start) {
    std::size_t node = start;
    path.clear();
    while (state[node] == 0) {
      state[node] = 1;
      path.push_back(node);
      if (is_root(node)) break;
      node = static_cast<std::size_t>(parent[node]);
      if (state[node] == 1) throw InvalidStructure("cycle in parent array");
    }
    for (std::size_t p : path) state[p] = 2;
  }

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    if (!is_root(i)) edges.push_back({static_cast<std::size_t>(parent[i]), i});
  return EdgeMap(n, std::move(edges));
}

}  // namespace sparsity
