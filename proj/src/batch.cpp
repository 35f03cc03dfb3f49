#include "robustreg/batch.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace robustreg {

std::vector<double> predict_serial(const PointwiseEstimator& est, const PointSet& points) {
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = est.predict(points[i]).value;
  return out;
}

std::vector<double> predict_parallel(const PointwiseEstimator& est, const PointSet& points) {
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  std::vector<double> out(points.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = est.predict(points[i]).value;
  return out;
}

std::vector<double> evaluate_serial(const PointFn& fn, const PointSet& points) {
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = fn(points[i]);
  return out;
}

std::vector<double> evaluate_parallel(const PointFn& fn, const PointSet& points) {
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  std::vector<double> out(points.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = fn(points[i]);
  return out;
}

int parallel_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_parallel_threads(int n) {
#if defined(_OPENMP)
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace robustreg
