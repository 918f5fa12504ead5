#include "sparsity/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "sparsity/errors.hpp"
#include "sparsity/haar.hpp"
#include "sparsity/prox.hpp"

namespace sparsity {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double random_sign(std::mt19937_64& rng) {
  return std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
}

// Rows [first, last) of X and y as a new problem.
RegressionProblem row_slice(const Matrix& X, std::span<const double> y, std::size_t first,
                            std::size_t last, double rho) {
  RegressionProblem p;
  p.X = Matrix(last - first, X.cols());
  for (std::size_t r = first; r < last; ++r)
    std::copy(X.row(r).begin(), X.row(r).end(), p.X.row(r - first).begin());
  p.y.assign(y.begin() + static_cast<std::ptrdiff_t>(first),
             y.begin() + static_cast<std::ptrdiff_t>(last));
  p.rho = rho;
  return p;
}

double rho_scale(const Matrix& X, std::span<const double> y) {
  double s = 0.0;
  for (double g : X.multiply_transpose(y)) s = std::max(s, std::abs(g));
  s /= static_cast<double>(X.rows());
  return s > 0.0 ? s : 1.0;
}

struct Fit {
  std::vector<double> beta;
  double wall_time_ms = 0.0;
  double inner_iters_mean = 0.0;
  bool converged = true;
};

// Everything a method needs to build its constraint for one cell.
struct Structure {
  ExperimentKind kind;
  std::size_t n;
  std::size_t rows;
  std::size_t cols;
  std::vector<long> tree_parents;
};

ConstraintSet constraint_for(Method method, const Structure& s, double alpha) {
  switch (method) {
    case Method::grid_c:
      if (s.kind == ExperimentKind::regions1d) return ConstraintSet::grid_1d(s.n, alpha);
      return ConstraintSet::grid_2d(s.rows, s.cols, alpha);
    case Method::tree_c:
      return ConstraintSet::tree(s.tree_parents);
    case Method::lasso:
      break;
  }
  return ConstraintSet::unconstrained(s.n);
}

Fit fit(Method method, const RegressionProblem& problem, const Structure& s, double alpha,
        const SolverConfig& config) {
  Fit out;
  if (method == Method::lasso) {
    LassoResult r = lasso_fista(problem, config);
    out.beta = std::move(r.beta);
    out.wall_time_ms = r.wall_time_ms;
    out.converged = r.converged;
    return out;
  }
  const ConstraintSet set = constraint_for(method, s, alpha);
  SolveResult r = nepio_solve(problem, set, config);
  out.beta = std::move(r.beta);
  out.wall_time_ms = r.diagnostics.wall_time_ms;
  out.inner_iters_mean = r.diagnostics.inner_iterations_mean();
  out.converged = r.diagnostics.converged;
  return out;
}

// Sweeps the hyperparameter grids for one method on one cell.
ResultRecord select_and_record(const ExperimentSpec& spec, Method method, const Matrix& X,
                               std::span<const double> y, std::span<const double> beta_star,
                               const Structure& s, std::size_t m_label, std::size_t run) {
  const bool uses_alpha = method == Method::grid_c;
  const std::vector<double> alphas = uses_alpha ? spec.alpha_grid : std::vector<double>{0.0};
  const std::size_t m = X.rows();

  std::size_t train_end = m;
  if (spec.selection == Selection::validation)
    train_end = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(0.8 * m)), 1, m - 1);

  RegressionProblem train = row_slice(X, y, 0, train_end, 1.0);
  const double scale = rho_scale(train.X, train.y);
  RegressionProblem validation;
  if (spec.selection == Selection::validation) validation = row_slice(X, y, train_end, m, 1.0);

  ResultRecord best;
  best.method = method;
  best.m = m_label;
  best.run = run;
  double best_score = std::numeric_limits<double>::infinity();

  for (double multiplier : spec.rho_grid) {
    train.rho = multiplier * scale;
    for (double alpha : alphas) {
      const Fit f = fit(method, train, s, alpha, spec.solver);
      const double error = model_error(f.beta, beta_star);
      double score = error;
      if (spec.selection == Selection::validation) {
        const auto pred = validation.X.multiply(f.beta);
        score = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i)
          score += (pred[i] - validation.y[i]) * (pred[i] - validation.y[i]);
      }
      if (score < best_score) {
        best_score = score;
        best.model_error = error;
        best.wall_time_ms = f.wall_time_ms;
        best.inner_iters_mean = f.inner_iters_mean;
        best.rho_selected = train.rho;
        best.alpha_selected = uses_alpha ? std::optional<double>(alpha) : std::nullopt;
        best.converged = f.converged;
      }
    }
  }
  return best;
}

std::vector<ResultRecord> run_scaling(const ExperimentSpec& spec) {
  std::vector<ResultRecord> records;
  const std::size_t m = spec.sample_sizes.front();
  for (std::size_t n : spec.problem_sizes) {
    const auto [rows, cols] = grid_shape(n);
    const Structure s{ExperimentKind::regions2d, n, rows, cols, {}};
    for (std::size_t run = 0; run < spec.runs; ++run) {
      auto rng = cell_rng(spec.seed, n, run);
      const auto beta_star = make_region_model_2d(rows, cols, spec.pattern, rng);
      const Matrix X = gaussian_design(m, n, rng);
      const auto y = generate_output(X, beta_star, spec.noise_std, rng);
      RegressionProblem problem{X, y, spec.rho_grid.front() * rho_scale(X, y)};
      for (Method method : spec.methods) {
        const double alpha = spec.alpha_grid.front();
        const Fit f = fit(method, problem, s, alpha, spec.solver);
        ResultRecord r;
        r.method = method;
        r.m = n;
        r.run = run;
        r.model_error = model_error(f.beta, beta_star);
        r.wall_time_ms = f.wall_time_ms;
        r.inner_iters_mean = f.inner_iters_mean;
        r.rho_selected = problem.rho;
        if (method == Method::grid_c) r.alpha_selected = alpha;
        r.converged = f.converged;
        records.push_back(r);
      }
    }
  }
  return records;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::regions1d: return "regions1d";
    case ExperimentKind::regions2d: return "regions2d";
    case ExperimentKind::scaling: return "scaling";
    case ExperimentKind::wavelet_tree: return "wavelet_tree";
  }
  return "?";
}

std::string to_string(Method method) {
  switch (method) {
    case Method::lasso: return "lasso";
    case Method::grid_c: return "grid_c";
    case Method::tree_c: return "tree_c";
  }
  return "?";
}

std::string to_string(Selection selection) {
  return selection == Selection::oracle ? "oracle" : "validation";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto k : {ExperimentKind::regions1d, ExperimentKind::regions2d, ExperimentKind::scaling,
                 ExperimentKind::wavelet_tree})
    if (to_string(k) == name) return k;
  throw DomainError("unknown experiment kind '" + name + "'");
}

Method parse_method(const std::string& name) {
  for (auto m : {Method::lasso, Method::grid_c, Method::tree_c})
    if (to_string(m) == name) return m;
  throw DomainError("unknown method '" + name + "'");
}

Selection parse_selection(const std::string& name) {
  if (name == "oracle") return Selection::oracle;
  if (name == "validation") return Selection::validation;
  throw DomainError("unknown selection rule '" + name + "'");
}

void ExperimentSpec::validate() const {
  solver.validate();
  if (runs == 0) throw DomainError("runs must be positive");
  if (rho_grid.empty()) throw DomainError("rho_grid is empty");
  for (double r : rho_grid)
    if (!(r > 0.0)) throw DomainError("rho_grid entries must be positive");
  if (methods.empty()) throw DomainError("no methods requested");
  if (!(noise_std >= 0.0)) throw DomainError("noise_std must be nonnegative");
  const bool needs_alpha =
      std::find(methods.begin(), methods.end(), Method::grid_c) != methods.end();
  if (needs_alpha) {
    if (alpha_grid.empty()) throw DomainError("alpha_grid is empty");
    for (double a : alpha_grid)
      if (!(a > 0.0)) throw DomainError("alpha_grid entries must be positive");
  }
  for (Method method : methods) {
    if (method == Method::tree_c && kind != ExperimentKind::regions1d &&
        kind != ExperimentKind::wavelet_tree)
      throw DomainError("tree_c is available for regions1d (chain) and wavelet_tree only");
    if (method == Method::grid_c && kind == ExperimentKind::wavelet_tree)
      throw DomainError("grid_c is not defined on wavelet coefficients");
  }

  switch (kind) {
    case ExperimentKind::regions1d:
      if (sparsity > n) throw InvalidDimension("sparsity exceeds n");
      if (region_count == 0 || region_count > sparsity)
        throw DomainError("region_count must lie in [1, sparsity]");
      if (sample_sizes.empty()) throw DomainError("sample_sizes is empty");
      break;
    case ExperimentKind::regions2d:
      region_pattern_2d(pattern);
      if (rows * cols < 2) throw InvalidDimension("grid needs at least two cells");
      if (sample_sizes.empty()) throw DomainError("sample_sizes is empty");
      break;
    case ExperimentKind::scaling:
      region_pattern_2d(pattern);
      if (problem_sizes.empty()) throw DomainError("problem_sizes is empty");
      if (sample_sizes.empty()) throw DomainError("sample_sizes is empty");
      break;
    case ExperimentKind::wavelet_tree:
      if (!is_power_of_two(rows) || rows < 8 || rows > 32)
        throw InvalidDimension("wavelet_tree: image side must be 8, 16 or 32");
      if (sample_sizes.empty() && !(measurement_factor > 0.0))
        throw DomainError("measurement_factor must be positive");
      break;
  }
  for (std::size_t m : sample_sizes)
    if (m < 2) throw InvalidDimension("sample sizes must be at least 2");
}

std::vector<double> default_rho_grid() {
  std::vector<double> grid(8);
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid[i] = std::pow(10.0, -4.0 + 5.0 * static_cast<double>(i) / 7.0);
  return grid;
}

ExperimentSpec experiment_preset(const std::string& name) {
  ExperimentSpec spec;
  spec.rho_grid = default_rho_grid();
  spec.seed = 7;
  spec.solver.max_outer = 1000;
  if (name == "regions1d") {
    spec.kind = ExperimentKind::regions1d;
    spec.n = 200;
    spec.sparsity = 20;
    spec.region_count = 2;
    spec.sample_sizes = {22, 40, 60, 80, 100};
    spec.alpha_grid = {1.0, 2.0, 4.0, 8.0};
  } else if (name == "regions2d") {
    spec.kind = ExperimentKind::regions2d;
    spec.rows = 20;
    spec.cols = 20;
    spec.pattern = "two_4x4_3x3";
    spec.sample_sizes = {30, 50, 75, 100, 125};
    // Two squares give a total variation of 28 in |beta*|.
    spec.alpha_grid = {4.0, 8.0, 16.0, 32.0};
  } else if (name == "scaling") {
    spec.kind = ExperimentKind::scaling;
    spec.pattern = "two_4x4_3x3";
    spec.problem_sizes = {200, 400, 800, 1600, 3200, 6400};
    spec.sample_sizes = {100};
    spec.runs = 3;
    spec.methods = {Method::grid_c};
    spec.rho_grid = {1.0};
    spec.alpha_grid = {16.0};
  } else if (name == "wavelet_tree") {
    spec.kind = ExperimentKind::wavelet_tree;
    spec.rows = spec.cols = 16;
    spec.sample_sizes = {};
    spec.measurement_factor = 3.0;
    spec.snr_db = 20.0;
    spec.runs = 5;
    spec.methods = {Method::lasso, Method::tree_c};
    spec.solver.max_outer = SolverConfig{}.max_outer;
  } else {
    throw DomainError("unknown experiment preset '" + name + "'");
  }
  return spec;
}

std::vector<std::size_t> region_lengths(std::size_t sparsity, std::size_t regions) {
  if (regions == 0 || sparsity < regions)
    throw DomainError("need at least one nonzero per region");
  std::vector<std::size_t> lengths(regions, sparsity / regions);
  for (std::size_t i = 0; i < sparsity % regions; ++i) ++lengths[i];
  return lengths;
}

std::vector<double> make_region_model_1d(std::size_t n, std::size_t regions,
                                         std::size_t sparsity, std::mt19937_64& rng) {
  const auto lengths = region_lengths(sparsity, regions);
  if (sparsity + regions - 1 > n) throw DomainError("regions do not fit in n");
  // Spare zeros beyond the mandatory single gaps, distributed over the
  // regions + 1 slots (stars and bars).
  const std::size_t spare = n - sparsity - (regions - 1);
  std::vector<std::size_t> slots(spare + regions);
  std::iota(slots.begin(), slots.end(), 0);
  std::vector<std::size_t> bars;
  std::sample(slots.begin(), slots.end(), std::back_inserter(bars), regions, rng);
  std::vector<std::size_t> order(regions);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> beta(n, 0.0);
  std::size_t pos = 0;
  std::size_t used_spare = 0;
  for (std::size_t r = 0; r < regions; ++r) {
    // bars[r] - r spare zeros precede region r in total.
    const std::size_t lead = bars[r] - r - used_spare;
    used_spare += lead;
    pos += lead + (r > 0 ? 1 : 0);
    for (std::size_t i = 0; i < lengths[order[r]]; ++i) beta[pos + i] = random_sign(rng);
    pos += lengths[order[r]];
  }
  return beta;
}

std::vector<RectShape> region_pattern_2d(const std::string& pattern) {
  if (pattern == "one_5x5") return {{5, 5}};
  if (pattern == "two_4x4_3x3") return {{4, 4}, {3, 3}};
  if (pattern == "three_3x3") return {{3, 3}, {3, 3}, {3, 3}};
  if (pattern == "four_3x2") return {{3, 2}, {3, 2}, {3, 2}, {3, 2}};
  throw DomainError("unknown 2D region pattern '" + pattern + "'");
}

std::vector<double> make_region_model_2d(std::size_t rows, std::size_t cols,
                                         const std::string& pattern, std::mt19937_64& rng) {
  const auto rects = region_pattern_2d(pattern);
  constexpr int kAttempts = 1000;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<char> occupied(rows * cols, 0);  // rectangle cells plus margins
    std::vector<double> beta(rows * cols, 0.0);
    bool ok = true;
    for (const RectShape& rect : rects) {
      if (rect.height > rows || rect.width > cols) throw DomainError("pattern does not fit the grid");
      std::uniform_int_distribution<std::size_t> row0(0, rows - rect.height);
      std::uniform_int_distribution<std::size_t> col0(0, cols - rect.width);
      const std::size_t r0 = row0(rng), c0 = col0(rng);
      for (std::size_t r = r0; r < r0 + rect.height && ok; ++r)
        for (std::size_t c = c0; c < c0 + rect.width; ++c)
          if (occupied[r * cols + c] != 0) {
            ok = false;
            break;
          }
      if (!ok) break;
      for (std::size_t r = r0; r < r0 + rect.height; ++r)
        for (std::size_t c = c0; c < c0 + rect.width; ++c) beta[r * cols + c] = random_sign(rng);
      // Mark the rectangle and its one-cell margin.
      const std::size_t rlo = r0 > 0 ? r0 - 1 : 0, clo = c0 > 0 ? c0 - 1 : 0;
      const std::size_t rhi = std::min(rows, r0 + rect.height + 1);
      const std::size_t chi = std::min(cols, c0 + rect.width + 1);
      for (std::size_t r = rlo; r < rhi; ++r)
        for (std::size_t c = clo; c < chi; ++c) occupied[r * cols + c] = 1;
    }
    if (ok) return beta;
  }
  throw DomainError("could not place the 2D regions after bounded retries");
}

Matrix gaussian_design(std::size_t m, std::size_t n, std::mt19937_64& rng) {
  if (m == 0 || n == 0) throw InvalidDimension("design must be nonempty");
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix X(m, n);
  for (double& x : X.data()) x = dist(rng);
  return X;
}

std::vector<double> generate_output(const Matrix& X, std::span<const double> beta_star,
                                    double noise_std, std::mt19937_64& rng) {
  auto y = X.multiply(beta_star);
  if (noise_std > 0.0) {
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double& v : y) v += noise_std * dist(rng);
  }
  return y;
}

double model_error(std::span<const double> beta, std::span<const double> beta_star) {
  if (beta.size() != beta_star.size()) throw InvalidDimension("model_error: size mismatch");
  double diff = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i)
    diff += (beta[i] - beta_star[i]) * (beta[i] - beta_star[i]);
  const double ref = norm2(beta_star);
  return ref > 0.0 ? std::sqrt(diff) / ref : std::sqrt(diff);
}

std::mt19937_64 cell_rng(std::uint64_t seed, std::size_t m, std::size_t run) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(run)};
  return std::mt19937_64(seq);
}

std::pair<std::size_t, std::size_t> grid_shape(std::size_t n) {
  if (n < 2) throw InvalidDimension("grid needs at least two cells");
  std::size_t rows = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (rows > 1 && n % rows != 0) --rows;
  return {rows, n / rows};
}

std::vector<ResultRecord> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.kind == ExperimentKind::scaling) return run_scaling(spec);

  std::vector<ResultRecord> records;
  if (spec.kind == ExperimentKind::wavelet_tree) {
    const std::size_t side = spec.rows;
    const Structure s{spec.kind, side * side, side, side, haar_quadtree_parents(side)};
    for (std::size_t run = 0; run < spec.runs; ++run) {
      auto rng = cell_rng(spec.seed, 0, run);
      const HaarTreeModel model = haar_tree_setup(side, rng);
      const auto nnz = static_cast<std::size_t>(
          std::count_if(model.beta_star.begin(), model.beta_star.end(), [](double v) { return v != 0.0; }));
      std::vector<std::size_t> ms = spec.sample_sizes;
      if (ms.empty())
        ms.push_back(std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(spec.measurement_factor * nnz))));
      for (std::size_t m : ms) {
        auto data_rng = cell_rng(spec.seed, m, run);
        const Matrix X = gaussian_design(m, s.n, data_rng);
        double noise = spec.noise_std;
        if (spec.snr_db) {
          const double rms = norm2(X.multiply(model.beta_star)) / std::sqrt(static_cast<double>(m));
          noise = rms * std::pow(10.0, -*spec.snr_db / 20.0);
        }
        const auto y = generate_output(X, model.beta_star, noise, data_rng);
        for (Method method : spec.methods)
          records.push_back(select_and_record(spec, method, X, y, model.beta_star, s, m, run));
      }
    }
    return records;
  }

  Structure s{spec.kind, spec.n, spec.rows, spec.cols, {}};
  if (spec.kind == ExperimentKind::regions2d) s.n = spec.rows * spec.cols;
  if (spec.kind == ExperimentKind::regions1d) {
    s.tree_parents.resize(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) s.tree_parents[i] = static_cast<long>(i) - 1;
  }
  for (std::size_t m : spec.sample_sizes) {
    for (std::size_t run = 0; run < spec.runs; ++run) {
      auto rng = cell_rng(spec.seed, m, run);
      const auto beta_star =
          spec.kind == ExperimentKind::regions1d
              ? make_region_model_1d(spec.n, spec.region_count, spec.sparsity, rng)
              : make_region_model_2d(spec.rows, spec.cols, spec.pattern, rng);
      const Matrix X = gaussian_design(m, s.n, rng);
      const auto y = generate_output(X, beta_star, spec.noise_std, rng);
      for (Method method : spec.methods)
        records.push_back(select_and_record(spec, method, X, y, beta_star, s, m, run));
    }
  }
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records) {
  std::vector<std::pair<Method, std::size_t>> order;
  std::map<std::pair<Method, std::size_t>, std::vector<const ResultRecord*>> groups;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.method, r.m);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<SummaryRow> rows;
  for (const auto& key : order) {
    const auto& g = groups[key];
    SummaryRow row{key.first, key.second, 0.0, 0.0, 0.0, 0.0, g.size()};
    for (const auto* r : g) {
      row.mean_error += r->model_error;
      row.mean_time_ms += r->wall_time_ms;
      row.mean_inner_iters += r->inner_iters_mean;
    }
    const double count = static_cast<double>(g.size());
    row.mean_error /= count;
    row.mean_time_ms /= count;
    row.mean_inner_iters /= count;
    if (g.size() > 1) {
      double ss = 0.0;
      for (const auto* r : g) ss += (r->model_error - row.mean_error) * (r->model_error - row.mean_error);
      row.stderr_error = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
    }
    rows.push_back(row);
  }
  return rows;
}

BenchProxReport bench_prox(std::size_t n, const std::string& structure,
                           std::size_t repetitions, std::uint64_t seed, double tol,
                           double kappa) {
  if (n < 2) throw InvalidDimension("bench_prox: n must be at least 2");
  if (repetitions == 0) throw DomainError("bench_prox: repetitions must be positive");
  const ConstraintSet set = [&] {
    if (structure == "grid1d") return ConstraintSet::grid_1d(n, 1.0);
    if (structure == "grid2d") {
      const auto [rows, cols] = grid_shape(n);
      return ConstraintSet::grid_2d(rows, cols, 1.0);
    }
    if (structure == "tree") {
      std::vector<long> parent(n);
      for (std::size_t i = 0; i < n; ++i) parent[i] = i == 0 ? -1 : static_cast<long>((i - 1) / 2);
      return ConstraintSet::tree(parent);
    }
    throw DomainError("bench_prox: unknown structure '" + structure + "'");
  }();
  const CompositeMap map(set);

  BenchProxReport report;
  report.n = n;
  report.structure = structure;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 2.0);
  std::vector<double> alpha(n), mu(n);
  const FixedPointOptions options{kappa, tol, 10000};
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    for (std::size_t i = 0; i < n; ++i) {
      alpha[i] = normal(rng);
      mu[i] = uniform(rng);
    }
    const ProxProblem problem{map, alpha, mu, 0.5, map.default_c()};
    const auto start = std::chrono::steady_clock::now();
    const ProxResult r = prox_gamma(problem, options);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report.times_ms.push_back(ms);
    report.iterations.push_back(r.state.iterations);
  }
  const double count = static_cast<double>(repetitions);
  report.mean_ms = std::accumulate(report.times_ms.begin(), report.times_ms.end(), 0.0) / count;
  double ss = 0.0;
  for (double t : report.times_ms) ss += (t - report.mean_ms) * (t - report.mean_ms);
  report.stddev_ms = repetitions > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
  report.mean_iterations =
      std::accumulate(report.iterations.begin(), report.iterations.end(), 0.0) / count;
  return report;
}

}  // namespace sparsity
