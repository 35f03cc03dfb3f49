#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "robustreg/dataset.hpp"
#include "robustreg/kernels.hpp"
#include "robustreg/neighbors.hpp"

namespace robustreg {

/// phi(u) = u^2 for |u| <= T, 2T|u| - T^2 otherwise.
double huber_loss(double u, double T);
/// phi'(u) = 2u on |u| <= T, saturating at +-2T.
double huber_grad(double u, double T);

inline double clip(double v, double M) noexcept { return v < -M ? -M : (v > M ? M : v); }

/// Bandwidth h, Huber threshold T and output bound M.
struct HuberParams {
  double h = 0.03;
  double T = 1.0;
  double M = 3.0;

  void validate() const;
  /// Default solver tolerance, 1e-6 * M.
  double default_tol() const noexcept { return 1e-6 * M; }
};

struct PointEstimate {
  double value = 0.0;
  std::size_t n_window = 0;  // samples with nonzero kernel weight
};

/// Samples with nonzero kernel weight around one query point.
struct Window {
  std::vector<double> weights;
  std::vector<double> labels;
  std::vector<std::size_t> indices;  // original sample indices

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }
  void clear() noexcept {
    weights.clear();
    labels.clear();
    indices.clear();
  }
  void push(double w, double y, std::size_t i) {
    weights.push_back(w);
    labels.push_back(y);
    indices.push_back(i);
  }
};

// Window-level solvers. Both the brute-force reference fits and the indexed
// estimators reduce to these.

/// sum_i w_i phi(y_i - s).
double huber_objective(std::span<const double> weights, std::span<const double> labels, double T,
                       double s);
/// Minimizer of huber_objective over [-M, M] by bisection on the sign of the
/// (nondecreasing) derivative; stops once the bracket is narrower than tol.
double huber_location(std::span<const double> weights, std::span<const double> labels, double T,
                      double M, double tol);
/// Clipped weighted mean. Window must be nonempty.
double nw_location(std::span<const double> weights, std::span<const double> labels, double M);
/// Drops ceil(f*n) smallest and ceil(f*n) largest labels (ties by index), then
/// clipped weighted mean; clipped median if nothing is left.
double trimmed_location(const Window& window, double trim_fraction, double M);
/// Median (mean of the two middle values for even counts), then clipped.
double clipped_median(std::vector<double> values, double M);

/// Group id in [0, b) for every sample: a seeded shuffle dealt round-robin,
/// so group sizes differ by at most one.
std::vector<std::uint32_t> mom_partition(std::size_t n, std::size_t b, std::uint64_t seed);

// Brute-force reference fits: a linear scan over the dataset per query.

PointEstimate fit_huber(const Dataset& data, const HuberParams& params, const Kernel& kernel,
                        std::span<const double> x, double tol);
PointEstimate fit_nw(const Dataset& data, double h, const Kernel& kernel, double M,
                     std::span<const double> x);
PointEstimate fit_mom(const Dataset& data, double h, const Kernel& kernel, double M, std::size_t b,
                      std::uint64_t seed, std::span<const double> x);
PointEstimate fit_trimmed(const Dataset& data, double h, const Kernel& kernel, double M,
                          double trim_fraction, std::span<const double> x);

/// Anything that can be evaluated at a point. Implementations are immutable
/// after construction and safe to call concurrently.
class PointwiseEstimator {
 public:
  virtual ~PointwiseEstimator() = default;
  virtual PointEstimate predict(std::span<const double> x) const = 0;
  virtual std::size_t dim() const noexcept = 0;

  double operator()(std::span<const double> x) const { return predict(x).value; }
};

/// Shared machinery of the local estimators: dataset, kernel and a
/// fixed-radius index with radius h.
class KernelSmoother : public PointwiseEstimator {
 public:
  KernelSmoother(Dataset data, double h, Kernel kernel);
  std::size_t dim() const noexcept override { return data_.dim(); }
  double bandwidth() const noexcept { return h_; }

 protected:
  void gather(std::span<const double> x, Window& out) const;
  const Dataset& data() const noexcept { return data_; }

 private:
  Dataset data_;
  double h_;
  Kernel kernel_;
  NeighborIndex index_;
};

class HuberEstimator final : public KernelSmoother {
 public:
  HuberEstimator(Dataset data, const HuberParams& params, Kernel kernel, double tol = 0.0);
  PointEstimate predict(std::span<const double> x) const override;
  const HuberParams& params() const noexcept { return params_; }

 private:
  HuberParams params_;
  double tol_;
};

/// Nadaraya-Watson estimate clipped to [-M, M].
class NadarayaWatsonEstimator final : public KernelSmoother {
 public:
  NadarayaWatsonEstimator(Dataset data, double h, Kernel kernel, double M);
  PointEstimate predict(std::span<const double> x) const override;

 private:
  double M_;
};

/// Median of per-group clipped Nadaraya-Watson estimates over a fixed random
/// partition into b groups. Groups with empty windows are skipped.
class MedianOfMeansEstimator final : public KernelSmoother {
 public:
  MedianOfMeansEstimator(Dataset data, double h, Kernel kernel, double M, std::size_t groups,
                         std::uint64_t seed);
  PointEstimate predict(std::span<const double> x) const override;

 private:
  double M_;
  std::size_t groups_;
  std::vector<std::uint32_t> group_of_;
};

class TrimmedMeanEstimator final : public KernelSmoother {
 public:
  TrimmedMeanEstimator(Dataset data, double h, Kernel kernel, double M, double trim_fraction);
  PointEstimate predict(std::span<const double> x) const override;

 private:
  double M_;
  double trim_;
};

}  // namespace robustreg
