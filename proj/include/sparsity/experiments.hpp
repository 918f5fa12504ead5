#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sparsity/constraint_set.hpp"
#include "sparsity/matrix.hpp"
#include "sparsity/solver.hpp"

namespace sparsity {

enum class ExperimentKind { regions1d, regions2d, scaling, wavelet_tree };
enum class Method { lasso, grid_c, tree_c };
enum class Selection { oracle, validation };

std::string to_string(ExperimentKind kind);
std::string to_string(Method method);
std::string to_string(Selection selection);
ExperimentKind parse_experiment_kind(const std::string& name);
Method parse_method(const std::string& name);
Selection parse_selection(const std::string& name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::regions1d;
  /// regions1d: signal length.
  std::size_t n = 200;
  /// regions2d: grid shape. wavelet_tree: rows is the image side.
  std::size_t rows = 20;
  std::size_t cols = 20;
  /// regions1d: number of nonzeros.
  std::size_t sparsity = 20;
  std::size_t region_count = 2;
  /// regions2d and scaling: one_5x5 | two_4x4_3x3 | three_3x3 | four_3x2.
  std::string pattern = "two_4x4_3x3";
  std::vector<std::size_t> sample_sizes{40};
  /// scaling: problem sizes n; each grid is the most square rows x cols = n.
  std::vector<std::size_t> problem_sizes;
  std::size_t runs = 10;
  double noise_std = 0.0;
  /// wavelet_tree: noise level as a signal-to-noise ratio; overrides noise_std.
  std::optional<double> snr_db;
  /// wavelet_tree: m = measurement_factor * sparsity when sample_sizes is empty.
  double measurement_factor = 3.0;
  /// Multipliers of ||X^T y||_inf / m.
  std::vector<double> rho_grid;
  /// Radii of the L1 ball (grid_c only).
  std::vector<double> alpha_grid{0.5, 1.0, 2.0, 4.0};
  std::vector<Method> methods{Method::lasso, Method::grid_c};
  Selection selection = Selection::oracle;
  std::uint64_t seed = 0;
  SolverConfig solver;

  /// Throws DomainError / InvalidDimension on an inconsistent spec.
  void validate() const;
};

/// Eight log-spaced multipliers over [1e-4, 1e1].
std::vector<double> default_rho_grid();

/// Named desk-scale presets: regions1d, regions2d, scaling, wavelet_tree.
/// Throws DomainError for an unknown name.
ExperimentSpec experiment_preset(const std::string& name);

struct ResultRecord {
  Method method = Method::lasso;
  /// Sample size; for scaling records, the problem size n.
  std::size_t m = 0;
  std::size_t run = 0;
  double model_error = 0.0;
  double wall_time_ms = 0.0;
  double inner_iters_mean = 0.0;
  double rho_selected = 0.0;
  std::optional<double> alpha_selected;
  bool converged = true;
};

/// Region lengths for `regions` contiguous runs totalling `sparsity`, as
/// even as possible (longer runs first).
std::vector<std::size_t> region_lengths(std::size_t sparsity, std::size_t regions);

/// Non-overlapping runs of random +-1 values, separated by at least one zero,
/// placed uniformly over the admissible layouts.
std::vector<double> make_region_model_1d(std::size_t n, std::size_t regions,
                                         std::size_t sparsity, std::mt19937_64& rng);

struct RectShape {
  std::size_t height;
  std::size_t width;
};

/// Rectangle list of a named 2D pattern. Throws DomainError when unknown.
std::vector<RectShape> region_pattern_2d(const std::string& pattern);

/// Random placement of the pattern rectangles on a rows x cols grid (row-major),
/// with a one-cell zero margin between them. Throws DomainError after a
/// bounded number of failed placements.
std::vector<double> make_region_model_2d(std::size_t rows, std::size_t cols,
                                         const std::string& pattern, std::mt19937_64& rng);

/// m x n matrix of independent standard normal entries.
Matrix gaussian_design(std::size_t m, std::size_t n, std::mt19937_64& rng);

/// y = X beta* + noise_std * xi.
std::vector<double> generate_output(const Matrix& X, std::span<const double> beta_star,
                                    double noise_std, std::mt19937_64& rng);

/// ||beta - beta*|| / ||beta*||; ||beta|| when beta* = 0.
double model_error(std::span<const double> beta, std::span<const double> beta_star);

/// Generator for one (m, run) cell; independent of the method so that every
/// method sees the same data.
std::mt19937_64 cell_rng(std::uint64_t seed, std::size_t m, std::size_t run);

/// Most square factorisation rows x cols = n with rows <= cols.
std::pair<std::size_t, std::size_t> grid_shape(std::size_t n);

std::vector<ResultRecord> run_experiment(const ExperimentSpec& spec);

struct SummaryRow {
  Method method;
  std::size_t m;
  double mean_error;
  double stderr_error;
  double mean_time_ms;
  double mean_inner_iters;
  std::size_t count;
};

/// Mean and standard error of the model error per (method, m), in order of
/// first appearance.
std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records);

struct BenchProxReport {
  std::size_t n = 0;
  std::string structure;
  std::vector<double> times_ms;
  std::vector<std::size_t> iterations;
  double mean_ms = 0.0;
  double stddev_ms = 0.0;
  double mean_iterations = 0.0;
};

/// Times prox_gamma on random inputs. structure: grid1d | grid2d | tree
/// (grid2d uses the most square shape with n cells, tree a binary heap).
BenchProxReport bench_prox(std::size_t n, const std::string& structure,
                           std::size_t repetitions, std::uint64_t seed = 1,
                           double tol = 1e-2, double kappa = 0.2);

}  // namespace sparsity
