#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "robustreg/batch.hpp"
#include "robustreg/dataset.hpp"
#include "robustreg/estimators.hpp"
#include "robustreg/lipschitz.hpp"
#include "robustreg/lp.hpp"

namespace robustreg {

/// Regular grid x_j = origin + j * spacing, j in [0, m_1) x ... x [0, m_d).
/// Flat node order is raster order (last axis fastest).
class Grid {
 public:
  /// Throws std::invalid_argument unless the grid covers [0,1]^d.
  Grid(std::vector<double> origin, double spacing, std::vector<std::size_t> counts);

  /// m nodes per axis on [0,1]^dim, spacing 1/(m-1).
  static Grid unit_cube(std::size_t dim, std::size_t m);

  std::size_t dim() const noexcept { return counts_.size(); }
  std::size_t size() const noexcept { return size_; }
  double spacing() const noexcept { return spacing_; }
  std::span<const double> origin() const noexcept { return origin_; }
  std::span<const std::size_t> counts() const noexcept { return counts_; }

  std::vector<std::size_t> multi_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const std::size_t> j) const;
  std::vector<double> node(std::size_t flat) const;
  PointSet nodes() const;

  bool operator==(const Grid& other) const = default;

 private:
  std::vector<double> origin_;
  double spacing_;
  std::vector<std::size_t> counts_;
  std::size_t size_ = 1;
};

/// Values at the nodes of a grid.
struct GridFunction {
  Grid grid;
  std::vector<double> values;

  GridFunction(Grid g, std::vector<double> v);
};

struct ProjectionParams {
  double L = 1.0;
  double tol = 1e-9;
  std::size_t max_sweeps = 10000;

  void validate() const;
};

struct ProjectionResult {
  GridFunction function;
  double objective = 0.0;  // sum_j |g_j - r_j|
  bool converged = false;
  std::size_t sweeps = 0;
};

/// Constraints |g_j - g_j'| <= L * a between axis-adjacent nodes.
ConstraintGraph grid_graph(const Grid& grid, double L);

/// Symmetrized k-nearest-neighbour graph (Euclidean) on scattered points with
/// bounds L * ||x_u - x_v||_1, i.e. a discrete version of max_k |dg/dx_k| <= L.
ConstraintGraph knn_graph(const PointSet& points, std::size_t k, double L);

/// r_j = fn(x_j) at every node. Throws DataError on a non-finite value.
GridFunction sample_to_grid(const PointwiseEstimator& est, const Grid& grid);
GridFunction sample_to_grid(const PointFn& fn, const Grid& grid);
GridFunction sample_to_grid_serial(const PointwiseEstimator& est, const Grid& grid);

/// L1 projection onto the discrete Lipschitz cone of the grid.
ProjectionResult project_lipschitz(const GridFunction& r, const ProjectionParams& params);

/// Same problem solved exactly by linear programming (small grids only).
ExactProjection project_lipschitz_exact(const GridFunction& r, double L);

/// Multilinear interpolation. Points outside the grid's box are clamped onto
/// it; `clamped` (if given) reports whether that happened.
double interpolate(const GridFunction& g, std::span<const double> x, bool* clamped = nullptr);

/// Interpolated projection of an initial estimator sampled on a grid.
class CorrectedEstimator final : public PointwiseEstimator {
 public:
  CorrectedEstimator(const PointwiseEstimator& initial, const Grid& grid,
                     const ProjectionParams& params);

  PointEstimate predict(std::span<const double> x) const override;
  std::size_t dim() const noexcept override { return projected_.grid.dim(); }

  const GridFunction& initial_values() const noexcept { return initial_; }
  const GridFunction& projected_values() const noexcept { return projected_; }
  bool converged() const noexcept { return converged_; }

 private:
  CorrectedEstimator(const GridFunction& initial, const ProjectionParams& params);
  CorrectedEstimator(const GridFunction& initial, ProjectionResult result);

  GridFunction initial_;
  GridFunction projected_;
  bool converged_;
};

CorrectedEstimator corrected_estimator(const Dataset& data, const HuberParams& params,
                                       const Kernel& kernel, const Grid& grid,
                                       const ProjectionParams& proj);

/// Projection of an estimator's values at scattered nodes onto the Lipschitz
/// cone of their k-NN graph. Used where a full grid is out of reach (d > 3).
struct ScatteredProjection {
  std::vector<double> initial;
  std::vector<double> values;
  bool converged = false;
};
ScatteredProjection project_scattered(const PointwiseEstimator& initial, const PointSet& nodes,
                                      std::size_t k, const ProjectionParams& params);

/// CSV with header j1..jd,value and one row per node in raster order.
void write_grid_function(const std::filesystem::path& path, const GridFunction& g);
/// Reads the values back onto a known grid. Throws DataError on a shape mismatch.
GridFunction read_grid_function(const std::filesystem::path& path, const Grid& grid);

}  // namespace robustreg
