#pragma once

#include <span>
#include <vector>

#include "robustreg/lipschitz.hpp"

namespace robustreg {

struct LpResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

/// Dense two-phase tableau simplex with Bland's rule:
/// minimize c.x subject to A x <= b, x >= 0. Intended for small reference
/// problems (a few thousand constraints at most).
LpResult solve_lp(const std::vector<std::vector<double>>& A, std::span<const double> b,
                  std::span<const double> c);

/// Exact L1 projection computed by linear programming: the optimal value plus
/// the componentwise least and greatest optimal solutions (optimal solutions
/// form a lattice), and their midpoint.
struct ExactProjection {
  double objective = 0.0;
  std::vector<double> least;
  std::vector<double> greatest;
  std::vector<double> canonical;
};

/// Reference mode for the Lipschitz projection. Throws std::length_error when
/// the LP would exceed `max_constraints` rows.
ExactProjection project_on_graph_exact(std::span<const double> r, const ConstraintGraph& graph,
                                       std::size_t max_constraints = 5000);

}  // namespace robustreg
