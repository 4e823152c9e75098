#pragma once

#include "provi/compile.hpp"
#include "provi/params.hpp"

namespace provi {

/// Parametric generative program.
using ProgramFn = std::function<GenPtr(const Params&)>;

/// Parametric choice of marginalization algorithm.
using AlgBuilder = std::function<AlgFn(const Params&)>;

/// Evidence lower bound: E_{z ~ guide}[log p(z) - log w_q]. Sampling the
/// guide and evaluating the model density both go through the estimator
/// interfaces, so guides may contain Marginal/Normalize nodes.
LossFn elbo(ProgramFn model, ProgramFn guide);

/// N-particle importance-weighted bound: the log of the mean importance
/// weight over independent guide particles. N = 1 coincides with elbo,
/// stream for stream.
LossFn iwelbo(ProgramFn model, ProgramFn guide, int n_particles);

/// Wake-phase guide update: z is drawn from an N-particle SIR approximation
/// of the model posterior built at the frozen parameter point; the loss is
/// the cross-entropy -log q(z) at the live parameters. The sampler is a
/// stop-gradient boundary (frozen parameters carry no tangents).
LossFn qwake(ProgramFn model, ProgramFn guide, int n_particles, ParamVector frozen);

/// Wake-phase model update: z is drawn from the SIR approximation as a
/// function of the live model parameters (proposal frozen); the loss is
/// log p(z) - log w_q. Gradients flow through the resampling weights.
LossFn pwake(ProgramFn model, ProgramFn guide, int n_particles, ParamVector frozen);

/// Hierarchical variant: wraps guide_joint in a Marginal over `kept` with
/// the given algorithm, then applies elbo. A lower bound on the
/// exact-marginal ELBO that tightens as the algorithm improves.
LossFn hvi_elbo(ProgramFn model, ProgramFn guide_joint, std::vector<std::string> kept,
                AlgBuilder alg);

}  // namespace provi
