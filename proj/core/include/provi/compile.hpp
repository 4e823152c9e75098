#pragma once

#include <string>
#include <vector>

#include "provi/gen.hpp"
#include "provi/logweight.hpp"
#include "provi/prob.hpp"
#include "provi/strategies.hpp"

namespace provi {

/// Result of evaluating a program's density against a trace: return value,
/// accumulated weight, unconsumed part of the trace and the consumed names.
/// `missed_address` names the first sampled address absent from the trace
/// (or present at the wrong type), when the zero weight came from a pop miss.
struct DensityResult {
    GroundValue retval;
    LogWeight log_weight;
    Trace remainder;
    std::vector<std::string> consumed;
    std::string missed_address;
};

/// Exact density interpreter. Pops each sampled address from the trace
/// (a miss zeroes the weight), multiplies observation likelihoods, and
/// returns the remainder. Total on arbitrary well-typed traces; throws
/// UnsupportedError if the walk reaches a Marginal/Normalize node and
/// SmoothnessViolation on discipline breaches along the evaluated path.
DensityResult density_eval(const GenPtr& p, const Trace& u);

/// Whole-program log density: density_eval, zeroed when the remainder is
/// non-empty (the trace is then not in the program's support).
LogWeight log_density(const GenPtr& p, const Trace& u);

/// Linear-scale density of the trace measure at u, with tangent.
Dual density(const GenPtr& p, const Trace& u);

/// Result of simulating a program: sampled trace, its weight and the
/// return value. For exact programs log_weight equals log_density at the
/// trace; for Marginal/Normalize programs the weight is the stochastic
/// estimate with the reciprocal-density contract.
struct SimResult {
    Trace trace;
    LogWeight log_weight;
    GroundValue retval;
};

/// Plain one-pass sampler: draws the prior over traces while accumulating
/// the weight incrementally. Reuse of an address is a hard error here.
/// Normalize nodes resample randomly; for gradient-aware simulation inside
/// objectives use sim_prob.
SimResult simulate(const GenPtr& p, RngStream& rng);

/// Strategy-aware simulator: every sample statement propagates duals
/// through its gradient strategy (enumeration strategies branch the whole
/// downstream computation).
Prob<SimResult> sim_prob(const GenPtr& p);

/// Density as an estimator. Exact programs yield a zero-variance (Dirac)
/// estimate equal to log_density; programs with Marginal/Normalize nodes
/// yield unbiased stochastic estimates of the linear-scale density. A trace
/// with unconsumed names yields the constant zero estimate.
Prob<LogWeight> density_est_prob(const GenPtr& p, const Trace& u);

/// One draw of the linear-scale density estimate at u.
Dual density_estimate_sample(const GenPtr& p, const Trace& u, RngStream& rng);

}  // namespace provi
