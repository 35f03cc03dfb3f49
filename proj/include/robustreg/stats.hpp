#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace robustreg {

inline double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double normal_pdf(double z) noexcept {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

/// Kolmogorov limiting distribution: P(sup|B| > t) = 2 sum (-1)^(k-1) exp(-2 k^2 t^2).
double kolmogorov_survival(double t);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample test of `sample` against N(mean, sd^2).
KsResult ks_normal(std::vector<double> sample, double mean, double sd);

/// Two-sample test with the asymptotic p-value (effective size n*m/(n+m),
/// with the usual small-sample correction of the argument).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

double mean(std::span<const double> v);
double median(std::vector<double> v);

}  // namespace robustreg
