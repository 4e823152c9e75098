#pragma once

#include <functional>
#include <string_view>

#include "provi/dist.hpp"
#include "provi/logweight.hpp"
#include "provi/rng.hpp"

namespace provi {

/// Continuation fed with a sampled value; returns the dual sample of the
/// rest of the computation.
using ContD = std::function<Dual(const GroundValue&, RngStream&)>;

/// Draw from the primitive's distribution. Values are tagged with the
/// strategy's output smoothness; Reparam samples carry the pathwise tangent
/// of the parameters, all other samples carry tangent 0.
GroundValue dist_simulate(const Dist& d, RngStream& rng, std::string_view origin = {});

/// Log density of x under d with respect to d's base measure, as a dual in
/// the parameters (and in x itself for smooth-in-location families). Out of
/// support or wrong type yields the zero weight; never throws on that. Does
/// throw SmoothnessViolation when a Smooth real reaches a family whose
/// density is discontinuous in the location (UniformStar, BetaStar).
LogWeight dist_log_density(const Dist& d, const GroundValue& x);

/// One estimator step: propagates the continuation through a sample of d,
/// following d's strategy. Satisfies
///   E[value]   = E_{x~d}[k(x).value]
///   E[tangent] = directional derivative of the above along the parameter
///                tangents
/// for bounded continuations. Enumeration strategies evaluate branch i on
/// rng.child(i) and consume no randomness for the choice itself.
Dual dist_estimate(const Dist& d, std::string_view name, const ContD& k, RngStream& rng);

/// Constant control variate subtracted from the downstream value in
/// score-function (REINFORCE) strategies. Any constant keeps the estimator
/// unbiased; default 0.
double reinforce_baseline();

/// Scoped override of the baseline for the current thread.
class BaselineScope {
  public:
    explicit BaselineScope(double b);
    ~BaselineScope();
    BaselineScope(const BaselineScope&) = delete;
    BaselineScope& operator=(const BaselineScope&) = delete;

  private:
    double prev_;
};

}  // namespace provi
