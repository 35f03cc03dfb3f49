#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "robustreg/dataset.hpp"

namespace robustreg {

/// Fixed-radius neighbor search over a point set in [0,1]^d.
///
/// For d <= 3 points are bucketed into a uniform cell grid whose cell width is
/// at least the radius, so a query scans the 3^d surrounding cells. Higher
/// dimensions fall back to a linear scan. Visiting order is deterministic.
class NeighborIndex {
 public:
  NeighborIndex(const PointSet& points, double radius);

  double radius() const noexcept { return radius_; }
  std::size_t dim() const noexcept { return dim_; }

  /// Calls visit(original_index, squared_distance) for every point with
  /// ||p - x|| <= radius (closed ball).
  template <class Visit>
  void for_each_within(std::span<const double> x, Visit&& visit) const {
    const double r2 = radius_ * radius_;
    if (cells_per_axis_ == 0) {
      for (std::size_t i = 0; i < order_.size(); ++i) scan_one(i, x, r2, visit);
      return;
    }
    std::array<std::size_t, 3> lo{}, hi{};
    for (std::size_t k = 0; k < dim_; ++k) {
      const std::size_t c = cell_of(x[k]);
      lo[k] = c == 0 ? 0 : c - 1;
      hi[k] = std::min(c + 1, cells_per_axis_ - 1);
    }
    const std::size_t m = cells_per_axis_;
    switch (dim_) {
      case 1:
        scan_range(cell_start_[lo[0]], cell_start_[hi[0] + 1], x, r2, visit);
        break;
      case 2:
        for (std::size_t a = lo[0]; a <= hi[0]; ++a) {
          const std::size_t row = a * m;
          scan_range(cell_start_[row + lo[1]], cell_start_[row + hi[1] + 1], x, r2, visit);
        }
        break;
      default:
        for (std::size_t a = lo[0]; a <= hi[0]; ++a)
          for (std::size_t b = lo[1]; b <= hi[1]; ++b) {
            const std::size_t row = (a * m + b) * m;
            scan_range(cell_start_[row + lo[2]], cell_start_[row + hi[2] + 1], x, r2, visit);
          }
        break;
    }
  }

 private:
  std::size_t cell_of(double v) const noexcept {
    const double c = std::floor(v * static_cast<double>(cells_per_axis_));
    if (!(c > 0.0)) return 0;
    return std::min(static_cast<std::size_t>(c), cells_per_axis_ - 1);
  }

  template <class Visit>
  void scan_one(std::size_t slot, std::span<const double> x, double r2, Visit& visit) const {
    const double* p = coords_.data() + slot * dim_;
    double d2 = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double diff = p[k] - x[k];
      d2 += diff * diff;
    }
    if (d2 <= r2) visit(order_[slot], d2);
  }

  template <class Visit>
  void scan_range(std::size_t begin, std::size_t end, std::span<const double> x, double r2,
                  Visit& visit) const {
    for (std::size_t s = begin; s < end; ++s) scan_one(s, x, r2, visit);
  }

  std::size_t dim_;
  double radius_;
  std::size_t cells_per_axis_ = 0;  // 0: linear scan
  std::vector<std::size_t> cell_start_;
  std::vector<std::size_t> order_;  // slot -> original index
  std::vector<double> coords_;      // slot-ordered copy
};

}  // namespace robustreg
