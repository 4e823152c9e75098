#pragma once

#include <cstdint>
#include <vector>

#include "provi/errors.hpp"

namespace provi {

// Ascent convention throughout: objectives (ELBO family) are maximized.

struct SgdState {
    double lr = 0.01;
};

struct AdamState {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t step = 0;
};

void sgd_step(SgdState& st, std::vector<double>& theta, const std::vector<double>& grad);

/// Standard bias-corrected update. Aborts on non-finite gradients.
void adam_step(AdamState& st, std::vector<double>& theta, const std::vector<double>& grad);

}  // namespace provi
