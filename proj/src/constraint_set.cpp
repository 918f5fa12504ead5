#include "sparsity/constraint_set.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "sparsity/errors.hpp"
#include "sparsity/kernels.hpp"

namespace sparsity {

void project_l1_ball(std::span<const double> t, double radius,
                     std::span<double> out) {
  if (!(radius > 0.0)) throw DomainError("L1 ball radius must be positive");
  if (out.size() != t.size()) throw InvalidDimension("project_l1_ball: size mismatch");
  double l1 = 0.0;
  for (double v : t) l1 += std::abs(v);
  if (l1 <= radius) {
    std::copy(t.begin(), t.end(), out.begin());
    return;
  }
  std::vector<double> mag(t.size());
  std::transform(t.begin(), t.end(), mag.begin(), [](double v) { return std::abs(v); });
  std::sort(mag.begin(), mag.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < mag.size(); ++j) {
    cumulative += mag[j];
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (mag[j] > candidate) theta = candidate;
    else break;
  }
  kernels::active().soft_threshold(t.data(), theta, out.data(), t.size());
}

void project_simple(const SimpleSet& set, std::span<const double> t,
                    std::span<double> out) {
  if (out.size() != t.size()) throw InvalidDimension("project_simple: size mismatch");
  if (std::holds_alternative<NonnegativeOrthant>(set)) {
    kernels::active().clamp_nonneg(t.data(), out.data(), t.size());
  } else {
    project_l1_ball(t, std::get<L1Ball>(set).radius, out);
  }
}

std::vector<double> project_simple(const SimpleSet& set, std::span<const double> t) {
  std::vector<double> out(t.size());
  project_simple(set, t, out);
  return out;
}

ConstraintSet::ConstraintSet(EdgeMap edge_map, SimpleSet simple_set)
    : edge_map_(std::move(edge_map)), simple_set_(simple_set) {
  if (const auto* ball = std::get_if<L1Ball>(&simple_set_); ball && !(ball->radius > 0.0))
    throw DomainError("L1 ball radius must be positive");
  description_.n = edge_map_.cols();
  description_.set = simple_set_;
}

ConstraintSet ConstraintSet::from_description(const ConstraintDescription& desc) {
  using Kind = ConstraintDescription::Kind;
  ConstraintSet out = [&] {
    switch (desc.kind) {
      case Kind::none:
        return ConstraintSet(EdgeMap(desc.n, {}), desc.set);
      case Kind::grid1d:
        return ConstraintSet(grid_edge_map_1d(desc.n), desc.set);
      case Kind::grid2d:
        return ConstraintSet(grid_edge_map_2d(desc.rows, desc.cols), desc.set);
      case Kind::tree:
        return ConstraintSet(tree_edge_map(desc.parents), desc.set);
      case Kind::custom:
        break;
    }
    throw InvalidStructure("unknown constraint kind");
  }();
  out.description_ = desc;
  out.description_.n = out.dim();
  return out;
}

ConstraintSet ConstraintSet::unconstrained(std::size_t n) {
  ConstraintDescription d;
  d.kind = ConstraintDescription::Kind::none;
  d.n = n;
  return from_description(d);
}

ConstraintSet ConstraintSet::grid_1d(std::size_t n, double alpha) {
  ConstraintDescription d;
  d.kind = ConstraintDescription::Kind::grid1d;
  d.n = n;
  d.set = L1Ball{alpha};
  return from_description(d);
}

ConstraintSet ConstraintSet::grid_2d(std::size_t rows, std::size_t cols, double alpha) {
  ConstraintDescription d;
  d.kind = ConstraintDescription::Kind::grid2d;
  d.rows = rows;
  d.cols = cols;
  d.set = L1Ball{alpha};
  return from_description(d);
}

ConstraintSet ConstraintSet::tree(std::span<const long> parent) {
  ConstraintDescription d;
  d.kind = ConstraintDescription::Kind::tree;
  d.parents.assign(parent.begin(), parent.end());
  d.set = NonnegativeOrthant{};
  return from_description(d);
}

bool is_feasible(const ConstraintSet& set, std::span<const double> lambda, double tol) {
  if (lambda.size() != set.dim())
    throw InvalidDimension("is_feasible: lambda has wrong dimension");
  if (tol < 0.0) throw DomainError("is_feasible: negative tolerance");
  for (double v : lambda)
    if (!(v >= -tol)) return false;
  const std::vector<double> t = set.edge_map().apply(lambda);
  const std::vector<double> p = project_simple(set.simple_set(), t);
  double dist_sq = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) dist_sq += (t[i] - p[i]) * (t[i] - p[i]);
  return std::sqrt(dist_sq) <= tol;
}

std::string to_string(ConstraintDescription::Kind kind) {
  switch (kind) {
    case ConstraintDescription::Kind::none: return "none";
    case ConstraintDescription::Kind::grid1d: return "grid1d";
    case ConstraintDescription::Kind::grid2d: return "grid2d";
    case ConstraintDescription::Kind::tree: return "tree";
    case ConstraintDescription::Kind::custom: return "custom";
  }
  return "unknown";
}

}  // namespace sparsity
