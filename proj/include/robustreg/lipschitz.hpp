#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace robustreg {

/// Difference constraints |g_u - g_v| <= bound over an undirected graph.
class ConstraintGraph {
 public:
  struct Edge {
    std::size_t u;
    std::size_t v;
    double bound;
  };
  struct Arc {
    std::size_t to;
    double bound;
  };

  ConstraintGraph(std::size_t n_nodes, std::vector<Edge> edges);

  std::size_t size() const noexcept { return n_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const Arc> neighbors(std::size_t j) const noexcept {
    return {arcs_.data() + offsets_[j], offsets_[j + 1] - offsets_[j]};
  }

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Arc> arcs_;
};

/// sum_j |g_j - r_j|
double l1_distance(std::span<const double> g, std::span<const double> r);

/// Largest amount by which `g` violates any edge bound (0 if feasible).
double max_violation(std::span<const double> g, const ConstraintGraph& graph);

struct SolverOptions {
  double tol = 1e-9;             // sweep stopping threshold (absolute, summed over nodes)
  std::size_t max_sweeps = 10000;
  std::size_t max_block_moves = 0;  // 0: 200 * nodes + 1000
};

struct GraphProjection {
  std::vector<double> values;
  double objective = 0.0;
  bool converged = false;
  std::size_t sweeps = 0;
  std::size_t block_moves = 0;
};

/// L1 projection of r onto {g : |g_u - g_v| <= bound for every edge}.
///
/// Starts from the constant median of r and runs per-node exact minimization
/// sweeps (raster order, then reverse) until they stall. A block phase then
/// moves whole node sets that are locked together by tight constraints; the
/// steepest such set is a minimum-weight closure found by max-flow. When no
/// set (moved up or down) decreases the objective the iterate is a global
/// optimum. The discrete optimum need not be unique, so the block phase is run
/// twice with a vanishing +-sum(g) tie-break to reach the least and the
/// greatest optimal solution, and their midpoint is returned. That selection
/// is monotone in r, commutes with constant shifts, and is the identity on
/// feasible inputs.
GraphProjection project_on_graph(std::span<const double> r, const ConstraintGraph& graph,
                                 const SolverOptions& options = {});

/// Per-node coordinate sweeps only, without the block phase. Kept for
/// comparison; it can stall away from the optimum.
GraphProjection project_on_graph_sweeps(std::span<const double> r, const ConstraintGraph& graph,
                                        const SolverOptions& options = {});

}  // namespace robustreg
