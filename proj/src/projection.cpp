#include "robustreg/projection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "robustreg/data_io.hpp"
#include "robustreg/errors.hpp"

namespace robustreg {

Grid::Grid(std::vector<double> origin, double spacing, std::vector<std::size_t> counts)
    : origin_(std::move(origin)), spacing_(spacing), counts_(std::move(counts)) {
  if (counts_.empty()) throw std::invalid_argument("grid needs at least one axis");
  if (origin_.size() != counts_.size()) throw std::invalid_argument("grid origin has wrong dimension");
  if (!(spacing_ > 0.0) || !std::isfinite(spacing_))
    throw std::invalid_argument("grid spacing must be positive");
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    if (counts_[k] < 2) throw std::invalid_argument("grid needs at least two nodes per axis");
    const double hi = origin_[k] + static_cast<double>(counts_[k] - 1) * spacing_;
    if (origin_[k] > 0.0 || hi < 1.0 - 1e-12)
      throw std::invalid_argument("grid does not cover the unit cube on axis " + std::to_string(k));
    size_ *= counts_[k];
  }
}

Grid Grid::unit_cube(std::size_t dim, std::size_t m) {
  if (m < 2) throw std::invalid_argument("grid needs at least two nodes per axis");
  return Grid(std::vector<double>(dim, 0.0), 1.0 / static_cast<double>(m - 1),
              std::vector<std::size_t>(dim, m));
}

std::vector<std::size_t> Grid::multi_index(std::size_t flat) const {
  std::vector<std::size_t> j(dim());
  for (std::size_t k = dim(); k-- > 0;) {
    j[k] = flat % counts_[k];
    flat /= counts_[k];
  }
  return j;
}

std::size_t Grid::flat_index(std::span<const std::size_t> j) const {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < dim(); ++k) flat = flat * counts_[k] + j[k];
  return flat;
}

std::vector<double> Grid::node(std::size_t flat) const {
  const auto j = multi_index(flat);
  std::vector<double> x(dim());
  for (std::size_t k = 0; k < dim(); ++k) x[k] = origin_[k] + static_cast<double>(j[k]) * spacing_;
  return x;
}

PointSet Grid::nodes() const {
  std::vector<double> coords;
  coords.reserve(size_ * dim());
  for (std::size_t i = 0; i < size_; ++i) {
    const auto x = node(i);
    coords.insert(coords.end(), x.begin(), x.end());
  }
  return PointSet(dim(), std::move(coords));
}

GridFunction::GridFunction(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size())
    throw std::invalid_argument("grid function has " + std::to_string(values.size()) +
                                " values for " + std::to_string(grid.size()) + " nodes");
  for (double x : values)
    if (!std::isfinite(x)) throw DataError("grid function value is not finite");
}

void ProjectionParams::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("Lipschitz constant must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("projection tolerance must be positive");
  if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be at least 1");
}

ConstraintGraph grid_graph(const Grid& grid, double L) {
  const double bound = L * grid.spacing();
  std::vector<ConstraintGraph::Edge> edges;
  const auto counts = grid.counts();
  std::vector<std::size_t> stride(grid.dim(), 1);
  for (std::size_t k = grid.dim() - 1; k-- > 0;) stride[k] = stride[k + 1] * counts[k + 1];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto j = grid.multi_index(i);
    for (std::size_t k = 0; k < grid.dim(); ++k)
      if (j[k] + 1 < counts[k]) edges.push_back({i, i + stride[k], bound});
  }
  return ConstraintGraph(grid.size(), std::move(edges));
}

ConstraintGraph knn_graph(const PointSet& points, std::size_t k, double L) {
  const std::size_t n = points.size();
  const std::size_t d = points.dim();
  k = std::min(k, n > 0 ? n - 1 : 0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = points[i][c] - points[j][c];
        s += diff * diff;
      }
      dist[j] = {j == i ? INFINITY : s, j};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    for (std::size_t t = 0; t < k; ++t) {
      const std::size_t j = dist[t].second;
      pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  std::vector<ConstraintGraph::Edge> edges;
  edges.reserve(pairs.size());
  for (auto [u, v] : pairs) {
    double l1 = 0.0;
    for (std::size_t c = 0; c < d; ++c) l1 += std::abs(points[u][c] - points[v][c]);
    edges.push_back({u, v, L * l1});
  }
  return ConstraintGraph(n, std::move(edges));
}

namespace {

GridFunction checked(const Grid& grid, std::vector<double> values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw DataError("estimator returned a non-finite value at grid node " + std::to_string(i));
  return GridFunction(grid, std::move(values));
}

}  // namespace

GridFunction sample_to_grid(const PointwiseEstimator& est, const Grid& grid) {
  if (est.dim() != grid.dim()) throw std::invalid_argument("estimator and grid dimensions differ");
  return checked(grid, predict_parallel(est, grid.nodes()));
}

GridFunction sample_to_grid(const PointFn& fn, const Grid& grid) {
  return checked(grid, evaluate_parallel(fn, grid.nodes()));
}

GridFunction sample_to_grid_serial(const PointwiseEstimator& est, const Grid& grid) {
  if (est.dim() != grid.dim()) throw std::invalid_argument("estimator and grid dimensions differ");
  return checked(grid, predict_serial(est, grid.nodes()));
}

ProjectionResult project_lipschitz(const GridFunction& r, const ProjectionParams& params) {
  params.validate();
  SolverOptions opts;
  opts.tol = params.tol;
  opts.max_sweeps = params.max_sweeps;
  auto res = project_on_graph(r.values, grid_graph(r.grid, params.L), opts);
  ProjectionResult out{GridFunction(r.grid, std::move(res.values)), res.objective, res.converged,
                       res.sweeps};
  return out;
}

ExactProjection project_lipschitz_exact(const GridFunction& r, double L) {
  return project_on_graph_exact(r.values, grid_graph(r.grid, L));
}

double interpolate(const GridFunction& g, std::span<const double> x, bool* clamped) {
  const Grid& grid = g.grid;
  const std::size_t d = grid.dim();
  if (x.size() != d) throw std::invalid_argument("point has wrong dimension");
  bool outside = false;
  std::vector<std::size_t> base(d);
  std::vector<double> frac(d);
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t m = grid.counts()[k];
    double t = (x[k] - grid.origin()[k]) / grid.spacing();
    const double tmax = static_cast<double>(m - 1);
    if (!(t >= 0.0)) {
      outside = outside || t < 0.0 || std::isnan(t);
      t = 0.0;
    } else if (t > tmax) {
      // Tiny overshoot from rounding in origin + (m-1)*a is not a clamp.
      outside = outside || t > tmax * (1.0 + 1e-12);
      t = tmax;
    }
    std::size_t j = static_cast<std::size_t>(t);
    if (j >= m - 1) j = m - 2;
    base[k] = j;
    frac[k] = t - static_cast<double>(j);
  }
  if (clamped) *clamped = outside;

  double value = 0.0;
  std::vector<std::size_t> corner(d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    double w = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const bool up = (mask >> k) & 1U;
      corner[k] = base[k] + (up ? 1 : 0);
      w *= up ? frac[k] : 1.0 - frac[k];
    }
    if (w != 0.0) value += w * g.values[grid.flat_index(corner)];
  }
  return value;
}

CorrectedEstimator::CorrectedEstimator(const PointwiseEstimator& initial, const Grid& grid,
                                       const ProjectionParams& params)
    : CorrectedEstimator(sample_to_grid(initial, grid), params) {}

CorrectedEstimator::CorrectedEstimator(const GridFunction& initial, const ProjectionParams& params)
    : CorrectedEstimator(initial, project_lipschitz(initial, params)) {}

CorrectedEstimator::CorrectedEstimator(const GridFunction& initial, ProjectionResult result)
    : initial_(initial), projected_(std::move(result.function)), converged_(result.converged) {}

PointEstimate CorrectedEstimator::predict(std::span<const double> x) const {
  return {interpolate(projected_, x), 0};
}

CorrectedEstimator corrected_estimator(const Dataset& data, const HuberParams& params,
                                       const Kernel& kernel, const Grid& grid,
                                       const ProjectionParams& proj) {
  if (data.dim() != grid.dim()) throw std::invalid_argument("data and grid dimensions differ");
  const HuberEstimator initial(data, params, kernel);
  return CorrectedEstimator(initial, grid, proj);
}

ScatteredProjection project_scattered(const PointwiseEstimator& initial, const PointSet& nodes,
                                      std::size_t k, const ProjectionParams& params) {
  params.validate();
  ScatteredProjection out;
  out.initial = predict_parallel(initial, nodes);
  for (double v : out.initial)
    if (!std::isfinite(v)) throw DataError("estimator returned a non-finite value");
  SolverOptions opts;
  opts.tol = params.tol;
  opts.max_sweeps = params.max_sweeps;
  auto res = project_on_graph(out.initial, knn_graph(nodes, k, params.L), opts);
  out.values = std::move(res.values);
  out.converged = res.converged;
  return out;
}

void write_grid_function(const std::filesystem::path& path, const GridFunction& g) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  for (std::size_t k = 0; k < g.grid.dim(); ++k) out << 'j' << (k + 1) << ',';
  out << "value\n";
  for (std::size_t i = 0; i < g.grid.size(); ++i) {
    for (std::size_t j : g.grid.multi_index(i)) out << j << ',';
    out << format_double(g.values[i]) << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

GridFunction read_grid_function(const std::filesystem::path& path, const Grid& grid) {
  const CsvTable table = read_csv_table(path);
  const std::size_t d = grid.dim();
  if (table.header.size() != d + 1 || table.header.back() != "value")
    throw DataError(path.string() + ": expected columns j1..j" + std::to_string(d) + ",value");
  if (table.rows.size() != grid.size())
    throw DataError(path.string() + ": expected " + std::to_string(grid.size()) + " rows");
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto expect = grid.multi_index(i);
    for (std::size_t k = 0; k < d; ++k)
      if (table.rows[i][k] != static_cast<double>(expect[k]))
        throw DataError(path.string() + ": row " + std::to_string(i + 2) + " is out of raster order");
    values[i] = table.rows[i][d];
  }
  return GridFunction(grid, std::move(values));
}

}  // namespace robustreg
