#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sparsity/edge_map.hpp"

namespace sparsity {

/// S = R^k_+ (conic constraint, Tree-C).
struct NonnegativeOrthant {
  friend bool operator==(const NonnegativeOrthant&, const NonnegativeOrthant&) = default;
};

/// S = { t : ||t||_1 <= radius } (norm constraint, Grid-C).
struct L1Ball {
  double radius = 1.0;
  friend bool operator==(const L1Ball&, const L1Ball&) = default;
};

using SimpleSet = std::variant<NonnegativeOrthant, L1Ball>;

/// Euclidean projection onto S, written into out (may alias t).
void project_simple(const SimpleSet& set, std::span<const double> t,
                    std::span<double> out);
std::vector<double> project_simple(const SimpleSet& set, std::span<const double> t);

/// Exact projection onto the L1 ball by sorting magnitudes, O(k log k).
void project_l1_ball(std::span<const double> t, double radius, std::span<double> out);

/// How a constraint set was built; round-trips through JSON.
struct ConstraintDescription {
  // custom: built from a raw EdgeMap; has no JSON form.
  enum class Kind { none, grid1d, grid2d, tree, custom };
  Kind kind = Kind::custom;
  std::size_t n = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<long> parents;
  SimpleSet set = NonnegativeOrthant{};

  friend bool operator==(const ConstraintDescription&, const ConstraintDescription&) = default;
};

/// Lambda = { lambda in R^n_+ : A lambda in S }. Immutable after construction.
class ConstraintSet {
 public:
  ConstraintSet(EdgeMap edge_map, SimpleSet simple_set);

  static ConstraintSet from_description(const ConstraintDescription& desc);

  /// k = 0: only the orthant constraint remains (the Lasso case).
  static ConstraintSet unconstrained(std::size_t n);
  /// Grid-C on a chain: ||A lambda||_1 <= alpha.
  static ConstraintSet grid_1d(std::size_t n, double alpha);
  static ConstraintSet grid_2d(std::size_t rows, std::size_t cols, double alpha);
  /// Tree-C: lambda_parent >= lambda_child.
  static ConstraintSet tree(std::span<const long> parent);

  const EdgeMap& edge_map() const { return edge_map_; }
  const SimpleSet& simple_set() const { return simple_set_; }
  std::size_t dim() const { return edge_map_.cols(); }
  std::size_t edge_count() const { return edge_map_.rows(); }

  const ConstraintDescription& description() const { return description_; }

 private:
  EdgeMap edge_map_;
  SimpleSet simple_set_;
  ConstraintDescription description_;
};

/// lambda_i >= -tol for every i and dist(A lambda, S) <= tol.
bool is_feasible(const ConstraintSet& set, std::span<const double> lambda, double tol);

std::string to_string(ConstraintDescription::Kind kind);

}  // namespace sparsity
