#pragma once

#include "provi/compile.hpp"

namespace provi {

// Stochastic density estimators and simulators for the Marginal and
// Normalize nodes, built from importance sampling and conditional
// importance sampling. All estimates are unbiased on the linear scale;
// weights are combined with a stable log-sum-exp average.

/// Average importance weight targeting the auxiliary posterior of `inner`
/// given the kept values: an unbiased estimate of the marginal density.
Prob<LogWeight> marginal_density_est(const Gen::Marginal& m, const Trace& kept_values);

/// Simulates a full inner trace, projects the kept names, and estimates the
/// density by conditional importance sampling (the actually-sampled
/// auxiliaries form the retained particle).
Prob<SimResult> marginal_sim(const Gen::Marginal& m);

/// Unnormalized density at u divided by a conditional-importance-sample
/// average weight: an unbiased estimate of the SIR output density.
Prob<LogWeight> normalize_density_est(const Gen::Normalize& n, const Trace& u);

/// Draws N proposal particles, resamples one by weight (enumerated, so the
/// selection is differentiated exactly), and returns it with the ratio of
/// its unnormalized density to the average weight.
Prob<SimResult> normalize_sim(const Gen::Normalize& n);

// Plain (gradient-free) draws used by the one-pass simulator.
SimResult marginal_simulate(const Gen::Marginal& m, RngStream& rng);
SimResult normalize_simulate(const Gen::Normalize& n, RngStream& rng);

}  // namespace provi
