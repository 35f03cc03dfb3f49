#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>

#include "robustreg/errors.hpp"

namespace robustreg {

/// Radial kernel supported on the closed unit ball, bounded in [c_K, C_K] on
/// its support and zero outside. Norm is Euclidean.
class Kernel {
 public:
  enum class Kind { triangular_shifted, uniform, custom };

  /// K(u) = 2 - |u| on |u| <= 1. c_K = 1, C_K = 2.
  static Kernel triangular_shifted() { return Kernel(Kind::triangular_shifted, 1.0, 2.0, {}); }
  /// K(u) = 1 on |u| <= 1.
  static Kernel uniform() { return Kernel(Kind::uniform, 1.0, 1.0, {}); }
  /// `shape(r)` for r = ||u|| in [0, 1]; caller guarantees lower <= shape <= upper.
  static Kernel custom(double lower, double upper, std::function<double(double)> shape);
  static Kernel parse(const std::string& name);

  /// Kernel value at radius r = ||u|| >= 0 (closed support: r == 1 is inside).
  double profile(double r) const noexcept {
    if (r > 1.0) return 0.0;
    switch (kind_) {
      case Kind::triangular_shifted:
        return 2.0 - r;
      case Kind::uniform:
        return 1.0;
      case Kind::custom:
        return shape_(r);
    }
    return 0.0;
  }

  Kind kind() const noexcept { return kind_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  std::string name() const;

 private:
  Kernel(Kind kind, double lower, double upper, std::function<double(double)> shape)
      : kind_(kind), lower_(lower), upper_(upper), shape_(std::move(shape)) {}

  Kind kind_;
  double lower_;
  double upper_;
  std::function<double(double)> shape_;
};

/// K((x - xi) / h).
inline double kernel_weight(const Kernel& k, std::span<const double> x, std::span<const double> xi,
                            double h) {
  if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  double d2 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = x[j] - xi[j];
    d2 += diff * diff;
  }
  if (d2 > h * h) return 0.0;
  return k.profile(std::sqrt(d2) / h);
}

}  // namespace robustreg
