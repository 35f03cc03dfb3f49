#include "robustreg/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "robustreg/data_io.hpp"
#include "robustreg/errors.hpp"
#include "robustreg/stats.hpp"

namespace robustreg {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double to_number(const std::string& field, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size() || !std::isfinite(v)) throw std::invalid_argument(field);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("", "malformed number '" + field + "' in '" + context + "'");
  }
}

void check_budget(const Dataset& data, std::size_t q) {
  if (q > data.size())
    throw std::invalid_argument("attack budget q=" + std::to_string(q) + " exceeds sample size " +
                                std::to_string(data.size()));
}

AttackResult relabel(const Dataset& data, std::vector<std::size_t> idx, std::vector<double> labels) {
  std::sort(idx.begin(), idx.end());
  return {data.with_labels(std::move(labels)), std::move(idx), 0};
}

// The k samples nearest to c among those not excluded, ordered by (distance, index).
std::vector<std::size_t> nearest(const Dataset& data, std::span<const double> c, std::size_t k,
                                 const std::vector<char>* excluded) {
  std::vector<std::pair<double, std::size_t>> cand;
  cand.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (excluded && (*excluded)[i]) continue;
    const auto x = data.point(i);
    double d2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) d2 += (x[j] - c[j]) * (x[j] - c[j]);
    cand.emplace_back(d2, i);
  }
  k = std::min(k, cand.size());
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
  std::vector<std::size_t> out(k);
  for (std::size_t t = 0; t < k; ++t) out[t] = cand[t].second;
  return out;
}

std::vector<double> parse_point(const std::string& text, const std::string& context) {
  std::vector<double> out;
  for (const auto& f : split(text, ';')) out.push_back(to_number(f, context));
  return out;
}

}  // namespace

ValueRule ValueRule::parse(const std::string& text) {
  const auto f = split(text, ':');
  if (f.size() == 2 && f[0] == "sign") return sign(to_number(f[1], text));
  if (f.size() == 2 && f[0] == "constant") return constant(to_number(f[1], text));
  if (f.size() == 3 && f[0] == "gaussian") {
    const double sd = to_number(f[2], text);
    if (sd < 0.0) throw ConfigError("", "negative standard deviation in '" + text + "'");
    return gaussian(to_number(f[1], text), sd);
  }
  throw ConfigError("", "unknown value rule '" + text + "'");
}

double ValueRule::draw(Rng& rng) const {
  switch (kind) {
    case Kind::sign:
      return rng.bernoulli(0.5) ? a : -a;
    case Kind::gaussian:
      return rng.normal(a, b);
    case Kind::constant:
      return a;
  }
  return a;
}

std::string ValueRule::to_string() const {
  switch (kind) {
    case Kind::sign:
      return "sign:" + format_double(a);
    case Kind::gaussian:
      return "gaussian:" + format_double(a) + ":" + format_double(b);
    case Kind::constant:
      return "constant:" + format_double(a);
  }
  return {};
}

AttackResult attack_random(const Dataset& data, std::size_t q, const ValueRule& rule,
                           std::uint64_t seed) {
  check_budget(data, q);
  Rng rng(seed, Stream::attack);
  auto idx = rng.sample_without_replacement(data.size(), q);
  std::vector<double> labels(data.labels().begin(), data.labels().end());
  for (std::size_t i : idx) labels[i] = rule.draw(rng);
  return relabel(data, std::move(idx), std::move(labels));
}

AttackResult attack_one_directional(const Dataset& data, std::size_t q, double value,
                                    std::uint64_t seed) {
  return attack_random(data, q, ValueRule::constant(value), seed);
}

AttackResult attack_concentrated(const Dataset& data, std::size_t q, double value,
                                 std::uint64_t seed, const std::optional<std::vector<double>>& c1,
                                 const std::optional<std::vector<double>>& c2) {
  check_budget(data, q);
  const std::size_t d = data.dim();
  Rng rng(seed, Stream::attack);
  auto center = [&](const std::optional<std::vector<double>>& given) {
    if (given) {
      if (given->size() != d) throw std::invalid_argument("attack center has wrong dimension");
      return *given;
    }
    std::vector<double> c(d);
    for (double& v : c) v = rng.uniform();
    return c;
  };
  // Both centers are always drawn so a fixed c1 does not shift c2's stream.
  const auto a = center(c1);
  const auto b = center(c2);
  const std::size_t half = q / 2;

  std::vector<double> labels(data.labels().begin(), data.labels().end());
  std::vector<char> taken(data.size(), 0);
  const auto first = nearest(data, a, half, nullptr);
  for (std::size_t i : first) {
    labels[i] = value;
    taken[i] = 1;
  }
  std::size_t overlap = 0;
  for (std::size_t i : nearest(data, b, half, nullptr)) overlap += taken[i] ? 1 : 0;
  const auto second = nearest(data, b, half, &taken);
  for (std::size_t i : second) labels[i] = -value;

  std::vector<std::size_t> idx = first;
  idx.insert(idx.end(), second.begin(), second.end());
  auto out = relabel(data, std::move(idx), std::move(labels));
  out.overlap = overlap;
  return out;
}

double gaussian_tv(double mu1, double mu2, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  return 2.0 * normal_cdf(std::abs(mu1 - mu2) / (2.0 * sigma)) - 1.0;
}

double sample_positive_part(double mu_from, double mu_to, double sigma, Rng& rng) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (mu_from == mu_to) throw std::invalid_argument("positive part is empty for equal means");
  const double s2 = 2.0 * sigma * sigma;
  while (true) {
    const double u = rng.normal(mu_to, sigma);
    // p_from(u) / p_to(u)
    const double ratio =
        std::exp(-((u - mu_from) * (u - mu_from) - (u - mu_to) * (u - mu_to)) / s2);
    if (ratio < 1.0 && rng.uniform() < 1.0 - ratio) return u;
  }
}

AttackResult attack_tv_mixture(const Dataset& data, std::size_t q, const TargetFunction& eta1,
                               const TargetFunction& eta2, double sigma, double radius,
                               int which_truth, std::uint64_t seed) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (which_truth != 1 && which_truth != 2) throw std::invalid_argument("which_truth must be 1 or 2");
  check_budget(data, q);
  Rng rng(seed, Stream::attack);

  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.point(i);
    double n2 = 0.0;
    for (double v : x) n2 += v * v;
    if (std::sqrt(n2) > radius) continue;
    const double tv = gaussian_tv(eta1(x), eta2(x), sigma);
    if (tv > 0.0 && rng.bernoulli(tv / (1.0 + tv))) pool.push_back(i);
  }
  std::vector<std::size_t> idx;
  if (pool.size() <= q) {
    idx = std::move(pool);
  } else {
    for (std::size_t t : rng.sample_without_replacement(pool.size(), q)) idx.push_back(pool[t]);
  }

  std::vector<double> labels(data.labels().begin(), data.labels().end());
  for (std::size_t i : idx) {
    const auto x = data.point(i);
    const double m1 = eta1(x);
    const double m2 = eta2(x);
    labels[i] = which_truth == 1 ? sample_positive_part(m1, m2, sigma, rng)
                                 : sample_positive_part(m2, m1, sigma, rng);
  }
  return relabel(data, std::move(idx), std::move(labels));
}

AttackSpec AttackSpec::parse(const std::string& text) {
  AttackSpec spec;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  const auto f = rest.empty() ? std::vector<std::string>{} : split(rest, ':');
  if (head == "none" && rest.empty()) {
    spec.kind = Kind::none;
  } else if (head == "random") {
    spec.kind = Kind::random;
    if (!rest.empty()) spec.rule = ValueRule::parse(rest);
  } else if (head == "one_directional" && f.size() <= 1) {
    spec.kind = Kind::one_directional;
    if (f.size() == 1) spec.value = to_number(f[0], text);
  } else if (head == "concentrated" && (f.size() <= 1 || f.size() == 3)) {
    spec.kind = Kind::concentrated;
    if (!f.empty()) spec.value = to_number(f[0], text);
    if (f.size() == 3) {
      spec.c1 = parse_point(f[1], text);
      spec.c2 = parse_point(f[2], text);
    }
  } else if (head == "tv_mixture" && f.size() >= 4) {
    spec.kind = Kind::tv_mixture;
    spec.sigma = to_number(f[0], text);
    spec.radius = to_number(f[1], text);
    const double truth = to_number(f[2], text);
    if (truth != 1.0 && truth != 2.0) throw ConfigError("", "truth must be 1 or 2 in '" + text + "'");
    spec.which_truth = static_cast<int>(truth);
    std::string targets;
    for (std::size_t i = 3; i < f.size(); ++i) targets += (i > 3 ? ":" : "") + f[i];
    const auto slash = targets.find('/');
    if (slash == std::string::npos)
      throw ConfigError("", "expected '<eta1>/<eta2>' in '" + text + "'");
    try {
      spec.eta1 = TargetFunction::parse(targets.substr(0, slash));
      spec.eta2 = TargetFunction::parse(targets.substr(slash + 1));
    } catch (const DataError& e) {
      throw ConfigError("", e.what());
    }
  } else {
    throw ConfigError("", "unknown attack '" + text + "'");
  }
  return spec;
}

std::string AttackSpec::name() const {
  switch (kind) {
    case Kind::none:
      return "none";
    case Kind::random:
      return "random";
    case Kind::one_directional:
      return "one_directional";
    case Kind::concentrated:
      return "concentrated";
    case Kind::tv_mixture:
      return "tv_mixture";
  }
  return {};
}

AttackResult apply_attack(const Dataset& data, const AttackSpec& spec, std::size_t q,
                          std::uint64_t seed) {
  check_budget(data, q);
  switch (spec.kind) {
    case AttackSpec::Kind::none:
      return {data, {}, 0};
    case AttackSpec::Kind::random:
      return attack_random(data, q, spec.rule, seed);
    case AttackSpec::Kind::one_directional:
      return attack_one_directional(data, q, spec.value, seed);
    case AttackSpec::Kind::concentrated:
      return attack_concentrated(data, q, spec.value, seed, spec.c1, spec.c2);
    case AttackSpec::Kind::tv_mixture:
      if (!spec.eta1 || !spec.eta2) throw std::invalid_argument("tv_mixture needs eta1 and eta2");
      return attack_tv_mixture(data, q, *spec.eta1, *spec.eta2, spec.sigma, spec.radius,
                               spec.which_truth, seed);
  }
  return {data, {}, 0};
}

}  // namespace robustreg
