#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace robustreg {

/// Row-major block of `size()` points in R^dim.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t dim, std::vector<double> coords);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const double> coords() const noexcept { return coords_; }

  /// Regular grid with `per_axis` nodes per axis spanning [0,1]^dim, last axis fastest.
  static PointSet regular_grid(std::size_t dim, std::size_t per_axis);
  /// i.i.d. uniform points on [0,1]^dim.
  static PointSet uniform(std::size_t dim, std::size_t n, std::uint64_t seed);

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

/// Training sample: covariates in the unit cube plus real labels.
///
/// Immutable. Covariates are shared between a dataset and the relabelled
/// copies produced by `with_labels`, so attacked datasets are cheap.
class Dataset {
 public:
  Dataset(PointSet points, std::vector<double> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return points_->dim(); }

  std::span<const double> point(std::size_t i) const noexcept { return (*points_)[i]; }
  double label(std::size_t i) const noexcept { return labels_[i]; }
  std::span<const double> labels() const noexcept { return labels_; }
  const PointSet& points() const noexcept { return *points_; }

  /// Same covariates, new labels.
  Dataset with_labels(std::vector<double> labels) const;
  /// Rows at `indices`, in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;

  bool shares_points_with(const Dataset& other) const noexcept {
    return points_ == other.points_;
  }

 private:
  Dataset(std::shared_ptr<const PointSet> points, std::vector<double> labels);

  std::shared_ptr<const PointSet> points_;
  std::vector<double> labels_;
};

/// Ground-truth regression function.
class TargetFunction {
 public:
  enum class Kind { sine1d, sincos2d, constant, cone, custom };

  /// sin(2*pi*x), d = 1.
  static TargetFunction sine1d();
  /// sin(2*pi*x1) + cos(2*pi*x2), d = 2.
  static TargetFunction sincos2d();
  static TargetFunction constant(double c);
  /// slope * max(radius - ||x||, 0); any dimension.
  static TargetFunction cone(double slope, double radius);
  /// Arbitrary callable. `dim == 0` means any dimension.
  static TargetFunction custom(std::string name, std::size_t dim,
                               std::function<double(std::span<const double>)> fn);

  /// Parses "sine1d", "sincos2d", "constant:<c>", "cone:<slope>:<radius>".
  static TargetFunction parse(const std::string& text);

  double operator()(std::span<const double> x) const;

  Kind kind() const noexcept { return kind_; }
  /// Required input dimension, 0 if any.
  std::size_t dim() const noexcept { return dim_; }
  bool supports_dim(std::size_t d) const noexcept { return dim_ == 0 || dim_ == d; }
  const std::string& name() const noexcept { return name_; }

 private:
  TargetFunction(Kind kind, std::size_t dim, std::string name)
      : kind_(kind), dim_(dim), name_(std::move(name)) {}

  Kind kind_;
  std::size_t dim_;
  std::string name_;
  double a_ = 0.0;
  double b_ = 0.0;
  std::function<double(std::span<const double>)> fn_;
};

struct NoiseSpec {
  double sigma = 1.0;  // Gaussian, mean zero
};

/// X_i ~ U[0,1]^dim, Y_i = eta(X_i) + sigma * N(0,1). Covariates and noise use
/// separate sub-streams of `seed`.
Dataset generate_synthetic(std::size_t n, std::size_t dim, const TargetFunction& target,
                           const NoiseSpec& noise, std::uint64_t seed);

/// Uniformly random disjoint split. Train size is round-half-to-even(f * N).
std::pair<Dataset, Dataset> split_train_test(const Dataset& data, double train_fraction,
                                             std::uint64_t seed);

}  // namespace robustreg
