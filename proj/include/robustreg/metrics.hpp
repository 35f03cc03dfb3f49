#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "robustreg/batch.hpp"
#include "robustreg/dataset.hpp"
#include "robustreg/estimators.hpp"

namespace robustreg {

struct RiskReport {
  enum class Mode { monte_carlo, dense_grid };
  double rmse = 0.0;
  double linf = 0.0;
  std::size_t n_eval = 0;
  Mode mode = Mode::monte_carlo;
};

/// Both errors over one point set. Predictions run in parallel; the reduction
/// is serial in point order, so results do not depend on the thread count.
RiskReport risk_on_points(const PointFn& estimate, const TargetFunction& truth,
                          const PointSet& points, RiskReport::Mode mode);

/// Root mean squared error over n_eval fresh uniform points.
double eval_l2(const PointwiseEstimator& est, const TargetFunction& truth, std::size_t n_eval,
               std::uint64_t seed);
double eval_l2(const PointFn& est, const TargetFunction& truth, std::size_t dim,
               std::size_t n_eval, std::uint64_t seed);

/// Max absolute error over a regular grid with `resolution` nodes per axis.
double eval_linf(const PointwiseEstimator& est, const TargetFunction& truth,
                 std::size_t resolution);
double eval_linf(const PointFn& est, const TargetFunction& truth, std::size_t dim,
                 std::size_t resolution);

/// Default sup-norm resolution per axis: 2001 for d = 1, 201 for d = 2.
std::size_t default_linf_resolution(std::size_t dim);

/// Least-squares slope of log(error) against log(N). Needs at least three
/// points, all positive.
double fit_rate(std::span<const std::pair<double, double>> points);

}  // namespace robustreg
