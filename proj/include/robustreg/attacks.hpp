#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robustreg/dataset.hpp"
#include "robustreg/rng.hpp"

namespace robustreg {

/// How a random attack picks the value written into each attacked label.
struct ValueRule {
  enum class Kind { sign, gaussian, constant };
  Kind kind = Kind::sign;
  double a = 10.0;  // sign: magnitude; gaussian: mean; constant: value
  double b = 0.0;   // gaussian: standard deviation

  /// +-v with equal probability.
  static ValueRule sign(double v) { return {Kind::sign, v, 0.0}; }
  static ValueRule gaussian(double mean, double sd) { return {Kind::gaussian, mean, sd}; }
  static ValueRule constant(double v) { return {Kind::constant, v, 0.0}; }
  /// "sign:<v>", "gaussian:<mean>:<sd>", "constant:<v>".
  static ValueRule parse(const std::string& text);

  double draw(Rng& rng) const;
  std::string to_string() const;
};

struct AttackResult {
  Dataset dataset;                        // attacked copy, same covariates
  std::vector<std::size_t> attacked;      // sorted
  std::size_t overlap = 0;                // concentrated: c2 neighbours already taken by c1
};

/// q indices drawn uniformly without replacement, labels replaced by `rule`.
AttackResult attack_random(const Dataset& data, std::size_t q, const ValueRule& rule,
                           std::uint64_t seed);

/// q uniform indices, all set to `value`.
AttackResult attack_one_directional(const Dataset& data, std::size_t q, double value,
                                    std::uint64_t seed);

/// Two centers c1, c2 (uniform on the cube unless given). The floor(q/2)
/// samples nearest c1 get +value; then the floor(q/2) nearest c2 among the
/// rest get -value. Euclidean distance, ties by index.
AttackResult attack_concentrated(const Dataset& data, std::size_t q, double value,
                                 std::uint64_t seed,
                                 const std::optional<std::vector<double>>& c1 = std::nullopt,
                                 const std::optional<std::vector<double>>& c2 = std::nullopt);

/// Total variation distance between N(mu1, s^2) and N(mu2, s^2).
double gaussian_tv(double mu1, double mu2, double sigma);

/// Draw from the density proportional to (p_to - p_from)_+, where p_* is the
/// N(mu_*, sigma^2) density. Rejection from N(mu_to, sigma^2); the acceptance
/// rate equals the TV distance. Requires mu_from != mu_to.
double sample_positive_part(double mu_from, double mu_to, double sigma, Rng& rng);

/// Mixing attack that makes two regression functions indistinguishable:
/// sample i with ||X_i|| <= radius joins B0 with probability
/// alpha_i = TV_i / (1 + TV_i); B0 is subsampled to q if larger; attacked
/// labels come from (p2 - p1)_+ when the truth is eta1 (which_truth = 1) and
/// from (p1 - p2)_+ when it is eta2.
AttackResult attack_tv_mixture(const Dataset& data, std::size_t q, const TargetFunction& eta1,
                               const TargetFunction& eta2, double sigma, double radius,
                               int which_truth, std::uint64_t seed);

/// An attack with its parameters, minus the budget and seed.
struct AttackSpec {
  enum class Kind { none, random, one_directional, concentrated, tv_mixture };
  Kind kind = Kind::none;
  ValueRule rule = ValueRule::sign(10.0);     // random
  double value = 10.0;                        // one_directional, concentrated
  std::optional<std::vector<double>> c1, c2;  // concentrated
  std::optional<TargetFunction> eta1, eta2;   // tv_mixture
  double sigma = 1.0;
  double radius = 0.0;
  int which_truth = 1;

  /// "none", "random[:<rule>]", "one_directional[:<v>]",
  /// "concentrated[:<v>[:<c1>:<c2>]]" with centers as "x1;x2;...",
  /// "tv_mixture:<sigma>:<radius>:<truth>:<eta1>/<eta2>" (targets as in
  /// TargetFunction::parse).
  static AttackSpec parse(const std::string& text);
  /// Short name used in tables: none, random, one_directional, concentrated, tv_mixture.
  std::string name() const;
};

/// Dispatches on the spec. Throws std::invalid_argument if q > N.
AttackResult apply_attack(const Dataset& data, const AttackSpec& spec, std::size_t q,
                          std::uint64_t seed);

}  // namespace robustreg
