#include "robustreg/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "robustreg/rng.hpp"

namespace robustreg {

double huber_loss(double u, double T) {
  const double a = std::abs(u);
  return a <= T ? u * u : 2.0 * T * a - T * T;
}

double huber_grad(double u, double T) {
  if (u > T) return 2.0 * T;
  if (u < -T) return -2.0 * T;
  return 2.0 * u;
}

void HuberParams::validate() const {
  if (!(h > 0.0)) throw std::invalid_argument("bandwidth h must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("Huber threshold T must be positive");
  if (!(M > 0.0)) throw std::invalid_argument("clip bound M must be positive");
}

double huber_objective(std::span<const double> weights, std::span<const double> labels, double T,
                       double s) {
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) total += weights[i] * huber_loss(labels[i] - s, T);
  return total;
}

namespace {

// d/ds of huber_objective; nondecreasing in s.
double huber_slope(std::span<const double> weights, std::span<const double> labels, double T,
                   double s) {
  double g = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) g -= weights[i] * huber_grad(labels[i] - s, T);
  return g;
}

double weighted_mean(std::span<const double> weights, std::span<const double> labels) {
  double sw = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    sw += weights[i];
    swy += weights[i] * labels[i];
  }
  return swy / sw;
}

}  // namespace

double huber_location(std::span<const double> weights, std::span<const double> labels, double T,
                      double M, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  if (huber_slope(weights, labels, T, -M) >= 0.0) return -M;
  if (huber_slope(weights, labels, T, M) <= 0.0) return M;
  double lo = -M, hi = M;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double g = huber_slope(weights, labels, T, mid);
    if (g < 0.0)
      lo = mid;
    else if (g > 0.0)
      hi = mid;
    else
      return mid;
  }
  return 0.5 * (lo + hi);
}

double nw_location(std::span<const double> weights, std::span<const double> labels, double M) {
  return clip(weighted_mean(weights, labels), M);
}

double clipped_median(std::vector<double> values, double M) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  const std::size_t n = values.size();
  std::sort(values.begin(), values.end());
  const double med = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return clip(med, M);
}

double trimmed_location(const Window& window, double trim_fraction, double M) {
  const std::size_t n = window.size();
  // The small offset keeps ceil() from rounding up products like 0.2 * 15
  // that land a few ulps above an integer.
  const auto k = static_cast<std::size_t>(
      std::ceil(trim_fraction * static_cast<double>(n) - 1e-9));
  if (k == 0) return nw_location(window.weights, window.labels, M);
  if (2 * k >= n) return clipped_median(window.labels, M);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (window.labels[a] != window.labels[b]) return window.labels[a] < window.labels[b];
    return window.indices[a] < window.indices[b];
  });
  double sw = 0.0, swy = 0.0;
  for (std::size_t r = k; r < n - k; ++r) {
    const std::size_t i = order[r];
    sw += window.weights[i];
    swy += window.weights[i] * window.labels[i];
  }
  return clip(swy / sw, M);
}

std::vector<std::uint32_t> mom_partition(std::size_t n, std::size_t b, std::uint64_t seed) {
  if (b == 0) throw std::invalid_argument("median-of-means needs at least one group");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed, Stream::partition);
  rng.shuffle(std::span<std::size_t>(perm));
  std::vector<std::uint32_t> group(n);
  for (std::size_t p = 0; p < n; ++p) group[perm[p]] = static_cast<std::uint32_t>(p % b);
  return group;
}

namespace {

void gather_bruteforce(const Dataset& data, double h, const Kernel& kernel,
                       std::span<const double> x, Window& out) {
  if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  out.clear();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double w = kernel_weight(kernel, x, data.point(i), h);
    if (w > 0.0) out.push(w, data.label(i), i);
  }
}

PointEstimate mom_from_window(const Window& window, std::span<const std::uint32_t> group_of,
                              std::size_t b, double M) {
  if (window.empty()) return {0.0, 0};
  std::vector<double> sw(b, 0.0), swy(b, 0.0);
  for (std::size_t j = 0; j < window.size(); ++j) {
    const auto g = group_of[window.indices[j]];
    sw[g] += window.weights[j];
    swy[g] += window.weights[j] * window.labels[j];
  }
  std::vector<double> group_values;
  group_values.reserve(b);
  for (std::size_t g = 0; g < b; ++g)
    if (sw[g] > 0.0) group_values.push_back(clip(swy[g] / sw[g], M));
  return {clipped_median(std::move(group_values), M), window.size()};
}

}  // namespace

PointEstimate fit_huber(const Dataset& data, const HuberParams& params, const Kernel& kernel,
                        std::span<const double> x, double tol) {
  params.validate();
  Window w;
  gather_bruteforce(data, params.h, kernel, x, w);
  if (w.empty()) return {0.0, 0};
  return {huber_location(w.weights, w.labels, params.T, params.M, tol), w.size()};
}

PointEstimate fit_nw(const Dataset& data, double h, const Kernel& kernel, double M,
                     std::span<const double> x) {
  Window w;
  gather_bruteforce(data, h, kernel, x, w);
  if (w.empty()) return {0.0, 0};
  return {nw_location(w.weights, w.labels, M), w.size()};
}

PointEstimate fit_mom(const Dataset& data, double h, const Kernel& kernel, double M, std::size_t b,
                      std::uint64_t seed, std::span<const double> x) {
  const auto groups = mom_partition(data.size(), b, seed);
  Window w;
  gather_bruteforce(data, h, kernel, x, w);
  return mom_from_window(w, groups, b, M);
}

PointEstimate fit_trimmed(const Dataset& data, double h, const Kernel& kernel, double M,
                          double trim_fraction, std::span<const double> x) {
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5))
    throw std::invalid_argument("trim fraction must lie in [0, 0.5)");
  Window w;
  gather_bruteforce(data, h, kernel, x, w);
  if (w.empty()) return {0.0, 0};
  return {trimmed_location(w, trim_fraction, M), w.size()};
}

KernelSmoother::KernelSmoother(Dataset data, double h, Kernel kernel)
    : data_(std::move(data)), h_(h), kernel_(std::move(kernel)), index_(data_.points(), h) {}

void KernelSmoother::gather(std::span<const double> x, Window& out) const {
  out.clear();
  const double inv_h = 1.0 / h_;
  index_.for_each_within(x, [&](std::size_t i, double d2) {
    const double w = kernel_.profile(std::sqrt(d2) * inv_h);
    if (w > 0.0) out.push(w, data_.label(i), i);
  });
}

HuberEstimator::HuberEstimator(Dataset data, const HuberParams& params, Kernel kernel, double tol)
    : KernelSmoother(std::move(data), params.h, std::move(kernel)),
      params_(params),
      tol_(tol > 0.0 ? tol : params.default_tol()) {
  params_.validate();
}

PointEstimate HuberEstimator::predict(std::span<const double> x) const {
  thread_local Window w;
  gather(x, w);
  if (w.empty()) return {0.0, 0};
  return {huber_location(w.weights, w.labels, params_.T, params_.M, tol_), w.size()};
}

NadarayaWatsonEstimator::NadarayaWatsonEstimator(Dataset data, double h, Kernel kernel, double M)
    : KernelSmoother(std::move(data), h, std::move(kernel)), M_(M) {}

PointEstimate NadarayaWatsonEstimator::predict(std::span<const double> x) const {
  thread_local Window w;
  gather(x, w);
  if (w.empty()) return {0.0, 0};
  return {nw_location(w.weights, w.labels, M_), w.size()};
}

MedianOfMeansEstimator::MedianOfMeansEstimator(Dataset data, double h, Kernel kernel, double M,
                                               std::size_t groups, std::uint64_t seed)
    : KernelSmoother(std::move(data), h, std::move(kernel)),
      M_(M),
      groups_(groups),
      group_of_(mom_partition(this->data().size(), groups, seed)) {}

PointEstimate MedianOfMeansEstimator::predict(std::span<const double> x) const {
  thread_local Window w;
  gather(x, w);
  return mom_from_window(w, group_of_, groups_, M_);
}

TrimmedMeanEstimator::TrimmedMeanEstimator(Dataset data, double h, Kernel kernel, double M,
                                           double trim_fraction)
    : KernelSmoother(std::move(data), h, std::move(kernel)), M_(M), trim_(trim_fraction) {
  if (!(trim_ >= 0.0 && trim_ < 0.5)) throw std::invalid_argument("trim fraction must lie in [0, 0.5)");
}

PointEstimate TrimmedMeanEstimator::predict(std::span<const double> x) const {
  thread_local Window w;
  gather(x, w);
  if (w.empty()) return {0.0, 0};
  return {trimmed_location(w, trim_, M_), w.size()};
}

}  // namespace robustreg
