#pragma once

#include "provi/params.hpp"

namespace provi {

enum class GradMode { Forward, Reverse };

struct GradSample {
    double value = 0.0;
    std::vector<double> grad;
};

/// One reverse-mode gradient sample: runs the loss once over a fresh tape
/// with the parameters as leaves, then sweeps backward. Surrogate terms
/// registered by score-function and weak-derivative strategies contribute
/// their adjoint seeds; the result is unbiased for the full gradient.
GradSample reverse_value_grad(const LossFn& loss, const ParamVector& pv, RngStream& rng);
std::vector<double> reverse_grad(const LossFn& loss, const ParamVector& pv, RngStream& rng);

/// One forward-mode gradient sample: n runs over basis directions, each on
/// a copy of the same stream so all coordinates share one random path.
GradSample forward_value_grad(const LossFn& loss, const ParamVector& pv, const RngStream& rng);

struct GradStats {
    std::vector<double> mean;
    std::vector<double> std_err;
    double value_mean = 0.0;
    double value_std_err = 0.0;
    int samples = 0;
};

/// Monte-Carlo average of gradient samples with per-coordinate standard
/// errors. Sample j always runs on root.child(j); workers fill disjoint
/// slots of a per-sample table which is reduced in index order, so the
/// result is bit-identical for any worker count.
GradStats grad_mean(const LossFn& loss, const ParamVector& pv, int samples, RngStream root,
                    GradMode mode, int workers = 1);

}  // namespace provi
