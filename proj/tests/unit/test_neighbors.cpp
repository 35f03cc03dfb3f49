#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "robustreg/neighbors.hpp"
#include "robustreg/rng.hpp"

using namespace robustreg;

namespace {

std::vector<std::size_t> brute(const PointSet& pts, std::span<const double> x, double r) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < pts.dim(); ++k) d2 += (pts[i][k] - x[k]) * (pts[i][k] - x[k]);
    if (d2 <= r * r) out.push_back(i);
  }
  return out;
}

}  // namespace

class NeighborIndexDim : public ::testing::TestWithParam<std::size_t> {};

TEST_P(NeighborIndexDim, MatchesBruteForce) {
  const std::size_t dim = GetParam();
  const auto pts = PointSet::uniform(dim, 2000, 17 + dim);
  Rng rng(dim);
  for (double r : {0.01, 0.07, 0.3, 2.0}) {
    const NeighborIndex index(pts, r);
    for (int t = 0; t < 50; ++t) {
      std::vector<double> x(dim);
      for (double& v : x) v = rng.uniform(-0.1, 1.1);  // also outside the cube
      std::vector<std::size_t> got;
      index.for_each_within(x, [&](std::size_t i, double) { got.push_back(i); });
      std::sort(got.begin(), got.end());
      EXPECT_EQ(got, brute(pts, x, r)) << "dim " << dim << " r " << r;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, NeighborIndexDim, ::testing::Values(1, 2, 3, 5));

TEST(NeighborIndex, ReportsSquaredDistance) {
  const PointSet pts(1, {0.2, 0.5});
  const NeighborIndex index(pts, 0.4);
  const double x[] = {0.3};
  std::vector<double> d2;
  index.for_each_within(x, [&](std::size_t, double d) { d2.push_back(d); });
  std::sort(d2.begin(), d2.end());
  ASSERT_EQ(d2.size(), 2u);
  EXPECT_NEAR(d2[0], 0.01, 1e-15);
  EXPECT_NEAR(d2[1], 0.04, 1e-15);
}

TEST(NeighborIndex, ClosedBallIncludesBoundary) {
  const PointSet pts(1, {0.0, 0.5, 1.0});
  const NeighborIndex index(pts, 0.5);
  const double x[] = {0.5};
  int count = 0;
  index.for_each_within(x, [&](std::size_t, double) { ++count; });
  EXPECT_EQ(count, 3);
}
