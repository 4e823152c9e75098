#include "provi/reverse.hpp"

#include <cmath>
#include <thread>

namespace provi {

GradSample reverse_value_grad(const LossFn& loss, const ParamVector& pv, RngStream& rng) {
    TapeScope scope;
    std::vector<std::int32_t> slots;
    const Params ps = Params::leaves(pv, slots);
    const Dual out = loss(ps).sample(rng);
    const std::vector<double> adj = scope.tape().backward(out.node);
    GradSample s;
    s.value = out.val;
    s.grad.resize(pv.size());
    for (std::size_t i = 0; i < pv.size(); ++i)
        s.grad[i] = slots[i] >= 0 ? adj[static_cast<std::size_t>(slots[i])] : 0.0;
    return s;
}

std::vector<double> reverse_grad(const LossFn& loss, const ParamVector& pv, RngStream& rng) {
    return reverse_value_grad(loss, pv, rng).grad;
}

GradSample forward_value_grad(const LossFn& loss, const ParamVector& pv, const RngStream& rng) {
    GradSample s;
    s.grad.resize(pv.size());
    if (pv.size() == 0) {
        RngStream r = rng;
        s.value = adev_grad(loss, pv, r).val;
        return s;
    }
    for (std::size_t i = 0; i < pv.size(); ++i) {
        RngStream r = rng;  // same stream for every direction: shared path
        const Dual d = adev_grad(loss, pv.basis_direction(i), r);
        s.grad[i] = d.tan;
        s.value = d.val;
    }
    return s;
}

GradStats grad_mean(const LossFn& loss, const ParamVector& pv, int samples, RngStream root,
                    GradMode mode, int workers) {
    if (samples < 1) throw DomainError("grad_mean needs samples >= 1");
    if (workers < 1) workers = 1;
    const std::size_t n = pv.size();
    std::vector<GradSample> rows(static_cast<std::size_t>(samples));

    auto work = [&](int begin, int end) {
        for (int j = begin; j < end; ++j) {
            RngStream rj = root.child(static_cast<std::uint64_t>(j));
            rows[static_cast<std::size_t>(j)] = mode == GradMode::Reverse
                                                    ? reverse_value_grad(loss, pv, rj)
                                                    : forward_value_grad(loss, pv, rj);
        }
    };

    if (workers == 1 || samples == 1) {
        work(0, samples);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (samples + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int b = w * chunk;
            const int e = std::min(samples, b + chunk);
            if (b >= e) break;
            pool.emplace_back(work, b, e);
        }
        for (auto& t : pool) t.join();
    }

    GradStats st;
    st.samples = samples;
    st.mean.assign(n, 0.0);
    st.std_err.assign(n, 0.0);
    std::vector<double> sq(n, 0.0);
    double vsum = 0.0, vsq = 0.0;
    // Reduce in sample order: the result does not depend on the worker count.
    for (const auto& row : rows) {
        vsum += row.value;
        vsq += row.value * row.value;
        for (std::size_t i = 0; i < n; ++i) {
            st.mean[i] += row.grad[i];
            sq[i] += row.grad[i] * row.grad[i];
        }
    }
    const double N = static_cast<double>(samples);
    st.value_mean = vsum / N;
    for (std::size_t i = 0; i < n; ++i) st.mean[i] /= N;
    if (samples > 1) {
        st.value_std_err = std::sqrt(std::max(0.0, (vsq - N * st.value_mean * st.value_mean) /
                                                       (N * (N - 1.0))));
        for (std::size_t i = 0; i < n; ++i)
            st.std_err[i] =
                std::sqrt(std::max(0.0, (sq[i] - N * st.mean[i] * st.mean[i]) / (N * (N - 1.0))));
    }
    return st;
}

}  // namespace provi
