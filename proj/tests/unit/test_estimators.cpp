#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "robustreg/batch.hpp"
#include "robustreg/estimators.hpp"
#include "robustreg/rng.hpp"

using namespace robustreg;

namespace {

// All samples at x = 0.5 so every one of them is in the window of x = 0.5.
Dataset stacked(std::vector<double> labels) {
  std::vector<double> coords(labels.size(), 0.5);
  return Dataset(PointSet(1, coords), std::move(labels));
}

const std::vector<double> kMid{0.5};

}  // namespace

TEST(HuberLoss, Values) {
  EXPECT_EQ(huber_loss(0.0, 1.0), 0.0);
  EXPECT_EQ(huber_loss(1.0, 1.0), 1.0);
  EXPECT_EQ(huber_loss(2.0, 1.0), 3.0);
  EXPECT_EQ(huber_loss(-2.0, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(huber_loss(0.3, 0.5), 0.09);
}

TEST(HuberLoss, GradientSaturates) {
  EXPECT_EQ(huber_grad(0.0, 1.0), 0.0);
  EXPECT_EQ(huber_grad(1.0, 1.0), 2.0);
  EXPECT_EQ(huber_grad(-5.0, 1.0), -2.0);
  EXPECT_EQ(huber_grad(7.0, 0.5), 1.0);
  for (double u = -4.0; u <= 4.0; u += 0.37) EXPECT_EQ(huber_grad(-u, 1.5), -huber_grad(u, 1.5));
}

TEST(HuberLoss, GradientMatchesFiniteDifference) {
  for (double u : {-3.0, -0.7, 0.2, 0.99, 1.5}) {
    const double e = 1e-6;
    const double fd = (huber_loss(u + e, 1.0) - huber_loss(u - e, 1.0)) / (2 * e);
    EXPECT_NEAR(huber_grad(u, 1.0), fd, 1e-6);
  }
}

TEST(HuberParams, RejectsNonPositive) {
  EXPECT_THROW((HuberParams{0.0, 1.0, 3.0}.validate()), std::invalid_argument);
  EXPECT_THROW((HuberParams{0.1, -1.0, 3.0}.validate()), std::invalid_argument);
  EXPECT_THROW((HuberParams{0.1, 1.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((HuberParams{0.1, 1.0, 3.0}.validate()));
}

TEST(FitHuber, CommonLabel) {
  const auto data = stacked({1.25, 1.25, 1.25, 1.25});
  const HuberParams p{0.1, 1.0, 3.0};
  const auto est = fit_huber(data, p, Kernel::triangular_shifted(), kMid, 1e-9);
  EXPECT_NEAR(est.value, 1.25, 1e-8);
  EXPECT_EQ(est.n_window, 4u);
}

TEST(FitHuber, ClipsToM) {
  const auto data = stacked({10, 10, 10});
  const auto est = fit_huber(data, {0.1, 1.0, 3.0}, Kernel::triangular_shifted(), kMid, 1e-9);
  EXPECT_EQ(est.value, 3.0);
  const auto neg = fit_huber(stacked({-10, -10}), {0.1, 1.0, 3.0}, Kernel::uniform(), kMid, 1e-9);
  EXPECT_EQ(neg.value, -3.0);
}

TEST(FitHuber, EmptyWindowGivesZero) {
  const Dataset data(PointSet(1, {0.0, 0.1}), {5.0, 5.0});
  const auto est = fit_huber(data, {0.05, 1.0, 3.0}, Kernel::triangular_shifted(), kMid, 1e-9);
  EXPECT_EQ(est.value, 0.0);
  EXPECT_EQ(est.n_window, 0u);
}

TEST(FitHuber, MatchesGridScanOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.index(60);
    const double T = std::vector<double>{0.5, 1.0, 2.0}[rng.index(3)];
    std::vector<double> w(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = rng.uniform(1.0, 2.0);
      y[i] = rng.uniform(-10.0, 10.0);
    }
    const double s = huber_location(w, y, T, 3.0, 3e-6);
    const auto scan = oracle::huber_grid_scan(w, y, T, 3.0, 1e-4);
    EXPECT_LE(oracle::huber_objective(w, y, T, s), scan.min + 2e-4) << "trial " << trial;
  }
}

TEST(Oracle, GridScanAgreesWithDirectSum) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> w(15), y(15);
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] = rng.uniform(0.5, 2.0);
      y[i] = rng.uniform(-5.0, 5.0);
    }
    const auto fast = oracle::huber_grid_scan(w, y, 1.0, 3.0, 1e-3);
    double best = INFINITY;
    for (int k = 0; k <= 6000; ++k) best = std::min(best, oracle::huber_objective(w, y, 1.0, -3.0 + k * 1e-3));
    EXPECT_NEAR(fast.min, best, 1e-9 * (1 + best));
    EXPECT_NEAR(oracle::huber_objective(w, y, 1.0, fast.argmin), fast.min, 1e-9 * (1 + best));
  }
}

TEST(FitHuber, AgreesWithNwWhenSpreadBelowT) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.index(40);
    std::vector<double> w(n), y(n);
    const double base = rng.uniform(-2.0, 2.0);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = rng.uniform(1.0, 2.0);
      y[i] = base + rng.uniform(0.0, 0.9);
    }
    const double nw = nw_location(w, y, 3.0);
    EXPECT_NEAR(huber_location(w, y, 1.0, 3.0, 1e-9), nw, 1e-8);
  }
}

TEST(FitHuber, TranslationEquivariant) {
  Rng rng(8);
  std::vector<double> w(30), y(30), y2(30);
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = rng.uniform(1.0, 2.0);
    y[i] = rng.normal(0.0, 1.0) + (i < 5 ? 6.0 : 0.0);
    y2[i] = y[i] + 0.4;
  }
  const double tol = 1e-9;
  EXPECT_NEAR(huber_location(w, y2, 1.0, 3.0, tol), huber_location(w, y, 1.0, 3.0, tol) + 0.4, 1e-8);
}

TEST(FitHuber, BoundedInfluence) {
  Rng rng(21);
  const double T = 1.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 20 + rng.index(30);
    std::vector<double> w(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = rng.uniform(1.0, 2.0);  // c_K = 1, C_K = 2
      y[i] = rng.uniform(-0.2, 0.2);
    }
    const double before = huber_location(w, y, T, 3.0, 1e-10);
    y[0] = rng.uniform(-1e6, 1e6);
    const double after = huber_location(w, y, T, 3.0, 1e-10);
    EXPECT_LE(std::abs(after - before), 2.0 * T * 2.0 / (1.0 * static_cast<double>(n)) + 1e-9);
  }
}

TEST(FitNw, Examples) {
  const Kernel k = Kernel::uniform();
  EXPECT_DOUBLE_EQ(fit_nw(stacked({0.7}), 0.1, k, 3.0, kMid).value, 0.7);
  EXPECT_DOUBLE_EQ(fit_nw(stacked({0.0, 2.0}), 0.1, k, 3.0, kMid).value, 1.0);
  EXPECT_DOUBLE_EQ(fit_nw(stacked({10, 10}), 0.1, k, 3.0, kMid).value, 3.0);
}

TEST(FitNw, KernelWeighted) {
  // weights 2 (distance 0) and 1.5 (distance h/2)
  const Dataset data(PointSet(1, {0.5, 0.55}), {1.0, 0.0});
  EXPECT_NEAR(fit_nw(data, 0.1, Kernel::triangular_shifted(), 3.0, kMid).value, 2.0 / 3.5, 1e-15);
}

TEST(FitMom, SingleGroupIsNw) {
  const auto data = generate_synthetic(500, 1, TargetFunction::sine1d(), {1.0}, 4);
  for (double x : {0.1, 0.37, 0.8}) {
    const std::vector<double> q{x};
    EXPECT_DOUBLE_EQ(fit_mom(data, 0.05, Kernel::triangular_shifted(), 3.0, 1, 9, q).value,
                     fit_nw(data, 0.05, Kernel::triangular_shifted(), 3.0, q).value);
  }
}

TEST(FitMom, MedianOfGroupEstimates) {
  EXPECT_EQ(clipped_median({-1.0, 0.0, 5.0}, 3.0), 0.0);
  EXPECT_EQ(clipped_median({-1.0, 0.0, 5.0, 7.0}, 3.0), 2.5);
  EXPECT_EQ(clipped_median({9.0}, 3.0), 3.0);
}

TEST(FitMom, PartitionIsBalancedAndSeeded) {
  const auto g = mom_partition(103, 20, 1);
  std::vector<int> count(20, 0);
  for (auto id : g) ++count.at(id);
  for (int c : count) EXPECT_TRUE(c == 5 || c == 6);
  EXPECT_EQ(g, mom_partition(103, 20, 1));
  EXPECT_NE(g, mom_partition(103, 20, 2));
}

TEST(FitMom, AllGroupsEmptyGivesZero) {
  const Dataset data(PointSet(1, {0.0, 0.01}), {2.0, 2.0});
  const auto est = fit_mom(data, 0.05, Kernel::uniform(), 3.0, 2, 1, kMid);
  EXPECT_EQ(est.value, 0.0);
  EXPECT_EQ(est.n_window, 0u);
}

TEST(FitTrimmed, ZeroFractionIsNw) {
  const auto data = generate_synthetic(400, 1, TargetFunction::sine1d(), {1.0}, 6);
  for (double x : {0.2, 0.5, 0.9}) {
    const std::vector<double> q{x};
    EXPECT_DOUBLE_EQ(fit_trimmed(data, 0.05, Kernel::triangular_shifted(), 3.0, 0.0, q).value,
                     fit_nw(data, 0.05, Kernel::triangular_shifted(), 3.0, q).value);
  }
}

TEST(FitTrimmed, DropsExtremes) {
  EXPECT_EQ(fit_trimmed(stacked({-100, 0, 0, 0, 100}), 0.1, Kernel::uniform(), 3.0, 0.2, kMid).value,
            0.0);
}

TEST(FitTrimmed, DropsCeilCountEachSide) {
  // Ten labels 0..9; ceil(0.2 * 10) = 2 dropped per side leaves 2..7.
  std::vector<double> y;
  for (int i = 0; i < 10; ++i) y.push_back(i * 0.1);
  EXPECT_NEAR(fit_trimmed(stacked(y), 0.1, Kernel::uniform(), 3.0, 0.2, kMid).value, 0.45, 1e-15);
  // ceil(0.15 * 10) = 2 as well.
  EXPECT_NEAR(fit_trimmed(stacked(y), 0.1, Kernel::uniform(), 3.0, 0.15, kMid).value, 0.45, 1e-15);
}

TEST(FitTrimmed, FallsBackToMedianWhenEverythingIsTrimmed) {
  // n = 2, ceil(0.4 * 2) = 1 per side removes both.
  EXPECT_EQ(fit_trimmed(stacked({1.0, 2.0}), 0.1, Kernel::uniform(), 3.0, 0.4, kMid).value, 1.5);
}

TEST(Estimators, OutputsStayWithinM) {
  const auto data = generate_synthetic(2000, 1, TargetFunction::sine1d(), {3.0}, 2);
  std::vector<double> y(data.labels().begin(), data.labels().end());
  for (std::size_t i = 0; i < y.size(); i += 3) y[i] = 50.0;
  const auto bad = data.with_labels(y);
  const Kernel k = Kernel::triangular_shifted();
  const HuberEstimator hub(bad, {0.05, 1.0, 3.0}, k);
  const NadarayaWatsonEstimator nw(bad, 0.05, k, 3.0);
  const MedianOfMeansEstimator mom(bad, 0.05, k, 3.0, 20, 1);
  const TrimmedMeanEstimator tr(bad, 0.05, k, 3.0, 0.2);
  for (int i = 0; i <= 100; ++i) {
    const std::vector<double> x{i / 100.0};
    for (const PointwiseEstimator* e : std::initializer_list<const PointwiseEstimator*>{&hub, &nw, &mom, &tr})
      EXPECT_LE(std::abs(e->predict(x).value), 3.0);
  }
}

class IndexedVsBruteForce : public ::testing::TestWithParam<std::size_t> {};

TEST_P(IndexedVsBruteForce, Agree) {
  const std::size_t d = GetParam();
  const auto target = d == 1 ? TargetFunction::sine1d()
                             : (d == 2 ? TargetFunction::sincos2d() : TargetFunction::constant(0.3));
  const auto data = generate_synthetic(1500, d, target, {1.0}, 17 + d);
  const double h = d == 1 ? 0.05 : 0.25;
  const Kernel k = Kernel::triangular_shifted();
  const HuberParams p{h, 1.0, 3.0};
  const HuberEstimator hub(data, p, k, 1e-9);
  const NadarayaWatsonEstimator nw(data, h, k, 3.0);
  const MedianOfMeansEstimator mom(data, h, k, 3.0, 20, 4);
  const TrimmedMeanEstimator tr(data, h, k, 3.0, 0.2);
  const auto queries = PointSet::uniform(d, 40, 99);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto x = queries[i];
    EXPECT_NEAR(hub.predict(x).value, fit_huber(data, p, k, x, 1e-9).value, 1e-8);
    EXPECT_EQ(hub.predict(x).n_window, fit_huber(data, p, k, x, 1e-9).n_window);
    EXPECT_NEAR(nw.predict(x).value, fit_nw(data, h, k, 3.0, x).value, 1e-12);
    EXPECT_NEAR(mom.predict(x).value, fit_mom(data, h, k, 3.0, 20, 4, x).value, 1e-12);
    EXPECT_NEAR(tr.predict(x).value, fit_trimmed(data, h, k, 3.0, 0.2, x).value, 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, IndexedVsBruteForce, ::testing::Values(1, 2, 3, 5));

TEST(Batch, ParallelMatchesSerial) {
  const auto data = generate_synthetic(5000, 2, TargetFunction::sincos2d(), {1.0}, 1);
  const HuberEstimator hub(data, {0.1, 1.0, 3.0}, Kernel::triangular_shifted());
  const auto pts = PointSet::uniform(2, 777, 3);
  EXPECT_EQ(predict_serial(hub, pts), predict_parallel(hub, pts));
}

TEST(FitMom, CleanRmseComparableToNw) {
  const auto data = generate_synthetic(10000, 1, TargetFunction::sine1d(), {1.0}, 12);
  const Kernel k = Kernel::triangular_shifted();
  const NadarayaWatsonEstimator nw(data, 0.03, k, 3.0);
  const MedianOfMeansEstimator mom(data, 0.03, k, 3.0, 20, 12);
  const auto pts = PointSet::uniform(1, 1000, 77);
  double e_nw = 0, e_mom = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double t = std::sin(2 * M_PI * pts[i][0]);
    e_nw += std::pow(nw(pts[i]) - t, 2);
    e_mom += std::pow(mom(pts[i]) - t, 2);
  }
  EXPECT_LE(std::sqrt(e_mom), 2.0 * std::sqrt(e_nw));
}
