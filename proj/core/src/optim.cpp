#include "provi/optim.hpp"

#include <cmath>
#include <string>

namespace provi {

namespace {
void check_finite(const std::vector<double>& grad) {
    for (std::size_t i = 0; i < grad.size(); ++i)
        if (!std::isfinite(grad[i]))
            throw DomainError("non-finite gradient in coordinate " + std::to_string(i));
}
}  // namespace

void sgd_step(SgdState& st, std::vector<double>& theta, const std::vector<double>& grad) {
    if (theta.size() != grad.size()) throw DomainError("sgd_step: size mismatch");
    check_finite(grad);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += st.lr * grad[i];
}

void adam_step(AdamState& st, std::vector<double>& theta, const std::vector<double>& grad) {
    if (theta.size() != grad.size()) throw DomainError("adam_step: size mismatch");
    check_finite(grad);
    if (st.m.empty()) {
        st.m.assign(theta.size(), 0.0);
        st.v.assign(theta.size(), 0.0);
    }
    if (st.m.size() != theta.size()) throw DomainError("adam_step: moment size mismatch");
    ++st.step;
    const double b1t = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
    const double b2t = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * grad[i];
        st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * grad[i] * grad[i];
        const double mhat = st.m[i] / b1t;
        const double vhat = st.v[i] / b2t;
        theta[i] += st.lr * mhat / (std::sqrt(vhat) + st.eps);
    }
}

}  // namespace provi
