#include "robustreg/neighbors.hpp"

#include <numeric>
#include <stdexcept>

namespace robustreg {

NeighborIndex::NeighborIndex(const PointSet& points, double radius)
    : dim_(points.dim()), radius_(radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("neighbor radius must be positive");
  const std::size_t n = points.size();

  if (dim_ <= 3) {
    // Cell width >= radius; total cell count bounded by a small multiple of n.
    auto m = static_cast<std::size_t>(std::floor(1.0 / radius));
    m = std::max<std::size_t>(m, 1);
    const double budget = std::max(64.0, 4.0 * static_cast<double>(n));
    const auto cap = static_cast<std::size_t>(std::floor(std::pow(budget, 1.0 / static_cast<double>(dim_))));
    cells_per_axis_ = std::max<std::size_t>(1, std::min(m, cap));
  }

  std::vector<std::size_t> cell(n, 0);
  std::size_t n_cells = 1;
  if (cells_per_axis_ > 0) {
    for (std::size_t k = 0; k < dim_; ++k) n_cells *= cells_per_axis_;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t c = 0;
      for (double v : points[i]) c = c * cells_per_axis_ + cell_of(v);
      cell[i] = c;
    }
  }

  order_.resize(n);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return cell[a] < cell[b]; });

  coords_.resize(n * dim_);
  for (std::size_t s = 0; s < n; ++s) {
    auto p = points[order_[s]];
    std::copy(p.begin(), p.end(), coords_.begin() + static_cast<std::ptrdiff_t>(s * dim_));
  }

  if (cells_per_axis_ > 0) {
    cell_start_.assign(n_cells + 1, 0);
    for (std::size_t i = 0; i < n; ++i) ++cell_start_[cell[i] + 1];
    std::partial_sum(cell_start_.begin(), cell_start_.end(), cell_start_.begin());
  }
}

}  // namespace robustreg
