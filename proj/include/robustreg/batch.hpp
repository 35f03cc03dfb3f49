#pragma once

#include <functional>
#include <span>
#include <vector>

#include "robustreg/dataset.hpp"
#include "robustreg/estimators.hpp"

namespace robustreg {

using PointFn = std::function<double(std::span<const double>)>;

// Evaluate an estimator at every point of a set. The serial versions are the
// reference the OpenMP versions are tested against; outputs are identical
// because every point is computed independently.

std::vector<double> predict_serial(const PointwiseEstimator& est, const PointSet& points);
std::vector<double> predict_parallel(const PointwiseEstimator& est, const PointSet& points);

std::vector<double> evaluate_serial(const PointFn& fn, const PointSet& points);
std::vector<double> evaluate_parallel(const PointFn& fn, const PointSet& points);

/// Number of OpenMP threads used by the parallel kernels (1 without OpenMP).
int parallel_threads();
void set_parallel_threads(int n);

}  // namespace robustreg
