#include "robustreg/dataset.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "robustreg/errors.hpp"
#include "robustreg/rng.hpp"

namespace robustreg {

PointSet::PointSet(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw DataError("point dimension must be positive");
  if (coords_.size() % dim_ != 0) throw DataError("coordinate count is not a multiple of dim");
}

PointSet PointSet::regular_grid(std::size_t dim, std::size_t per_axis) {
  if (per_axis < 2) throw DataError("regular grid needs at least 2 nodes per axis");
  std::size_t n = 1;
  for (std::size_t k = 0; k < dim; ++k) n *= per_axis;
  std::vector<double> coords(n * dim);
  const double step = 1.0 / static_cast<double>(per_axis - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    for (std::size_t k = dim; k-- > 0;) {
      coords[i * dim + k] = static_cast<double>(rest % per_axis) * step;
      rest /= per_axis;
    }
  }
  return PointSet(dim, std::move(coords));
}

PointSet PointSet::uniform(std::size_t dim, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> coords(n * dim);
  for (auto& c : coords) c = rng.uniform();
  return PointSet(dim, std::move(coords));
}

Dataset::Dataset(PointSet points, std::vector<double> labels)
    : Dataset(std::make_shared<const PointSet>(std::move(points)), std::move(labels)) {}

Dataset::Dataset(std::shared_ptr<const PointSet> points, std::vector<double> labels)
    : points_(std::move(points)), labels_(std::move(labels)) {
  if (labels_.empty()) throw DataError("dataset must contain at least one sample");
  if (points_->size() != labels_.size()) throw DataError("points and labels differ in length");
  for (double c : points_->coords()) {
    if (!(c >= 0.0 && c <= 1.0)) throw DataError("covariate outside the unit cube");
  }
  for (double y : labels_) {
    if (!std::isfinite(y)) throw DataError("non-finite label");
  }
}

Dataset Dataset::with_labels(std::vector<double> labels) const {
  if (labels.size() != size()) throw DataError("relabelling must keep the sample count");
  return Dataset(points_, std::move(labels));
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> coords;
  coords.reserve(indices.size() * dim());
  std::vector<double> labels;
  labels.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= size()) throw DataError("subset index out of range");
    auto p = point(i);
    coords.insert(coords.end(), p.begin(), p.end());
    labels.push_back(labels_[i]);
  }
  return Dataset(PointSet(dim(), std::move(coords)), std::move(labels));
}

TargetFunction TargetFunction::sine1d() { return {Kind::sine1d, 1, "sine1d"}; }

TargetFunction TargetFunction::sincos2d() { return {Kind::sincos2d, 2, "sincos2d"}; }

TargetFunction TargetFunction::constant(double c) {
  std::ostringstream os;
  os << "constant:" << c;
  TargetFunction f(Kind::constant, 0, os.str());
  f.a_ = c;
  return f;
}

TargetFunction TargetFunction::cone(double slope, double radius) {
  if (!(radius > 0.0)) throw DataError("cone radius must be positive");
  std::ostringstream os;
  os << "cone:" << slope << ':' << radius;
  TargetFunction f(Kind::cone, 0, os.str());
  f.a_ = slope;
  f.b_ = radius;
  return f;
}

TargetFunction TargetFunction::custom(std::string name, std::size_t dim,
                                      std::function<double(std::span<const double>)> fn) {
  TargetFunction f(Kind::custom, dim, std::move(name));
  f.fn_ = std::move(fn);
  return f;
}

TargetFunction TargetFunction::parse(const std::string& text) {
  if (text == "sine1d") return sine1d();
  if (text == "sincos2d") return sincos2d();
  auto fields = [&] {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) out.push_back(part);
    return out;
  }();
  try {
    if (fields.size() == 2 && fields[0] == "constant") return constant(std::stod(fields[1]));
    if (fields.size() == 3 && fields[0] == "cone")
      return cone(std::stod(fields[1]), std::stod(fields[2]));
  } catch (const std::logic_error&) {
    throw DataError("malformed target function '" + text + "'");
  }
  throw DataError("unknown target function '" + text + "'");
}

double TargetFunction::operator()(std::span<const double> x) const {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  switch (kind_) {
    case Kind::sine1d:
      return std::sin(two_pi * x[0]);
    case Kind::sincos2d:
      return std::sin(two_pi * x[0]) + std::cos(two_pi * x[1]);
    case Kind::constant:
      return a_;
    case Kind::cone: {
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      return a_ * std::max(b_ - std::sqrt(r2), 0.0);
    }
    case Kind::custom:
      return fn_(x);
  }
  return 0.0;
}

Dataset generate_synthetic(std::size_t n, std::size_t dim, const TargetFunction& target,
                           const NoiseSpec& noise, std::uint64_t seed) {
  if (n == 0) throw DataError("sample count must be positive");
  if (dim == 0) throw DataError("dimension must be positive");
  if (!target.supports_dim(dim))
    throw DataError("target '" + target.name() + "' does not support dimension " +
                    std::to_string(dim));
  if (!(noise.sigma >= 0.0)) throw DataError("noise sigma must be non-negative");

  Rng sampling(seed, Stream::sampling);
  std::vector<double> coords(n * dim);
  for (auto& c : coords) c = sampling.uniform();
  PointSet points(dim, std::move(coords));

  Rng noise_rng(seed, Stream::noise);
  std::vector<double> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = noise_rng.normal();
    labels[i] = target(points[i]) + noise.sigma * w;
  }
  return Dataset(std::move(points), std::move(labels));
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data, double train_fraction,
                                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw DataError("train fraction must lie strictly between 0 and 1");
  const std::size_t n = data.size();
  // nearbyint honours the default rounding mode, which is round-half-to-even.
  const auto n_train = static_cast<std::size_t>(std::nearbyint(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n)
    throw DataError("split leaves an empty train or test set");

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  Rng rng(seed, Stream::split);
  rng.shuffle(std::span<std::size_t>(perm));

  std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {data.subset(train), data.subset(test)};
}

}  // namespace robustreg
