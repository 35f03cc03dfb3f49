#include "robustreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "robustreg/rng.hpp"

namespace robustreg {

RiskReport risk_on_points(const PointFn& estimate, const TargetFunction& truth,
                          const PointSet& points, RiskReport::Mode mode) {
  if (points.empty()) throw std::invalid_argument("no evaluation points");
  const auto pred = evaluate_parallel(estimate, points);
  double sq = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double e = std::abs(pred[i] - truth(points[i]));
    sq += e * e;
    worst = std::max(worst, e);
  }
  RiskReport r;
  r.rmse = std::sqrt(sq / static_cast<double>(points.size()));
  r.linf = worst;
  r.n_eval = points.size();
  r.mode = mode;
  return r;
}

namespace {

PointFn as_fn(const PointwiseEstimator& est) {
  return [&est](std::span<const double> x) { return est.predict(x).value; };
}

}  // namespace

double eval_l2(const PointFn& est, const TargetFunction& truth, std::size_t dim,
               std::size_t n_eval, std::uint64_t seed) {
  if (n_eval < 1) throw std::invalid_argument("n_eval must be at least 1");
  const auto pts = PointSet::uniform(dim, n_eval, stream_seed(seed, Stream::evaluation));
  return risk_on_points(est, truth, pts, RiskReport::Mode::monte_carlo).rmse;
}

double eval_l2(const PointwiseEstimator& est, const TargetFunction& truth, std::size_t n_eval,
               std::uint64_t seed) {
  return eval_l2(as_fn(est), truth, est.dim(), n_eval, seed);
}

double eval_linf(const PointFn& est, const TargetFunction& truth, std::size_t dim,
                 std::size_t resolution) {
  if (resolution < 2) throw std::invalid_argument("grid resolution must be at least 2");
  return risk_on_points(est, truth, PointSet::regular_grid(dim, resolution),
                        RiskReport::Mode::dense_grid)
      .linf;
}

double eval_linf(const PointwiseEstimator& est, const TargetFunction& truth,
                 std::size_t resolution) {
  return eval_linf(as_fn(est), truth, est.dim(), resolution);
}

std::size_t default_linf_resolution(std::size_t dim) {
  if (dim <= 1) return 2001;
  if (dim == 2) return 201;
  return 21;
}

double fit_rate(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw std::invalid_argument("rate fit needs at least three points");
  double sx = 0.0, sy = 0.0;
  for (auto [n, e] : points) {
    if (!(n > 0.0) || !(e > 0.0)) throw std::invalid_argument("rate fit needs positive entries");
    sx += std::log(n);
    sy += std::log(e);
  }
  const double k = static_cast<double>(points.size());
  const double mx = sx / k, my = sy / k;
  double sxx = 0.0, sxy = 0.0;
  for (auto [n, e] : points) {
    const double dx = std::log(n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(e) - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("rate fit needs distinct sample sizes");
  return sxy / sxx;
}

}  // namespace robustreg
