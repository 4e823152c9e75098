#pragma once

#include <string>
#include <vector>

#include "provi/value.hpp"

namespace provi {

enum class Family { Normal, Flip, Categorical, UniformStar, Poisson, BetaStar };

/// Per-primitive derivative-propagation rule. Each (family, strategy) pair
/// is a distinct version of the primitive: same distribution, different
/// estimator and different smoothness type for the sampled value.
enum class StrategyTag { Reparam, Reinforce, Enum, Mvd, NoneStar };

const char* to_string(Family f);
const char* to_string(StrategyTag s);
StrategyTag parse_strategy(const std::string& tag);

/// Primitive distribution instance: family, dual-number parameters and the
/// gradient strategy annotation.
///
/// Constructor checks: parameter arity and range (by value part),
/// family/strategy compatibility, and the rule that UniformStar/BetaStar
/// parameters must be Star-tagged (their densities are not smooth in the
/// parameters, so learned inputs are rejected up front).
class Dist {
  public:
    static Dist normal(RealValue mu, RealValue sigma, StrategyTag s = StrategyTag::Reparam);
    static Dist flip(RealValue p, StrategyTag s = StrategyTag::Enum);
    static Dist categorical(std::vector<RealValue> probs, StrategyTag s = StrategyTag::Enum);
    static Dist uniform_star(RealValue lo, RealValue hi);
    static Dist poisson(RealValue rate);
    static Dist beta_star(RealValue a, RealValue b);

    Family family() const { return family_; }
    StrategyTag strategy() const { return strategy_; }
    const std::vector<RealValue>& params() const { return params_; }

    GroundType output_type() const;
    /// Sampled-value tag: Smooth only for Normal x Reparam.
    Smoothness output_smoothness() const;
    BaseMeasureKind base_measure() const { return base_measure_of(output_type()); }

    bool finite_support() const {
        return family_ == Family::Flip || family_ == Family::Categorical;
    }
    std::size_t support_size() const;
    GroundValue support_value(std::size_t i) const;

  private:
    Dist(Family f, StrategyTag s, std::vector<RealValue> p)
        : family_(f), strategy_(s), params_(std::move(p)) {}

    Family family_;
    StrategyTag strategy_;
    std::vector<RealValue> params_;
};

}  // namespace provi
