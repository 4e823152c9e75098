#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "provi/dual.hpp"
#include "provi/errors.hpp"
#include "provi/rng.hpp"

namespace provi {

/// Probabilistic computation in continuation-passing style: given a
/// continuation producing a dual sample and a random stream, produce a dual
/// sample. For every bounded continuation k, the expectation of run(k, rng)
/// over the stream equals the integral of k against the represented
/// (possibly unnormalized) measure, in both the value and the tangent.
template <class T>
struct Prob {
    using Cont = std::function<Dual(const T&, RngStream&)>;
    std::function<Dual(const Cont&, RngStream&)> run;
};

template <class T>
Prob<std::decay_t<T>> prob_return(T&& x) {
    using V = std::decay_t<T>;
    return Prob<V>{[x = std::forward<T>(x)](const typename Prob<V>::Cont& k, RngStream& rng) {
        return k(x, rng);
    }};
}

namespace detail {
template <class P>
struct prob_value;
template <class T>
struct prob_value<Prob<T>> {
    using type = T;
};
}  // namespace detail

/// Monadic sequencing; CPS composition with the stream threaded through.
template <class A, class F>
auto prob_bind(Prob<A> m, F f) {
    using BV = typename detail::prob_value<std::invoke_result_t<F, const A&>>::type;
    return Prob<BV>{[m = std::move(m), f = std::move(f)](const typename Prob<BV>::Cont& k,
                                                         RngStream& rng) {
        return m.run([&](const A& a, RngStream& r) { return f(a).run(k, r); }, rng);
    }};
}

/// Multiplicative density factor: represents the unnormalized measure w * mu.
/// The returned sample is w (x) rest with the dual product rule.
template <class T>
Prob<T> prob_score(Dual w, Prob<T> rest) {
    if (w.val < 0.0) throw DomainError("score weight must be nonnegative");
    return Prob<T>{[w, rest = std::move(rest)](const typename Prob<T>::Cont& k, RngStream& rng) {
        return w * rest.run(k, rng);
    }};
}

/// Estimator of a loss: each draw is an unbiased dual sample of
/// (loss, directional derivative).
struct LossEst {
    std::function<Dual(RngStream&)> sample;
};

/// E : the expectation boundary. Draws one sample of the represented
/// measure with the identity continuation.
inline LossEst expect(Prob<Dual> m) {
    return LossEst{[m = std::move(m)](RngStream& rng) {
        return m.run([](const Dual& x, RngStream&) { return x; }, rng);
    }};
}

/// Constant (zero-variance) loss estimator.
inline LossEst exact_loss(Dual r) {
    return LossEst{[r](RngStream&) { return r; }};
}

inline LossEst loss_add(LossEst a, LossEst b) {
    return LossEst{[a = std::move(a), b = std::move(b)](RngStream& rng) {
        RngStream ra = rng.child(0), rb = rng.child(1);
        return a.sample(ra) + b.sample(rb);
    }};
}

inline LossEst loss_scale(double c, LossEst a) {
    return LossEst{[c, a = std::move(a)](RngStream& rng) { return c * a.sample(rng); }};
}

/// Product of two losses from independent substreams; unbiased for the
/// product of the expectations by independence.
inline LossEst loss_mul(LossEst a, LossEst b) {
    return LossEst{[a = std::move(a), b = std::move(b)](RngStream& rng) {
        RngStream ra = rng.child(0), rb = rng.child(1);
        return a.sample(ra) * b.sample(rb);
    }};
}

/// Unbiased estimator of exp(E[a]) from the Poisson product
///   e^lambda lambda^-N prod_{i<N} a_i,   N ~ Poisson(lambda),
/// with independent draws a_i. The dual product rule yields the tangent
/// sum_j a_j' prod_{i!=j} a_i without any division by draw values.
inline LossEst loss_exp(LossEst a, double lambda = 1.0) {
    if (!(lambda > 0.0)) throw DomainError("loss_exp needs lambda > 0");
    return LossEst{[a = std::move(a), lambda](RngStream& rng) {
        RngStream rn = rng.child(0);
        const std::int64_t n = rn.poisson(lambda);
        Dual prod = make_dual(std::exp(lambda) * std::pow(lambda, -static_cast<double>(n)));
        for (std::int64_t i = 0; i < n; ++i) {
            RngStream ri = rng.child(static_cast<std::uint64_t>(1 + i));
            prod = prod * a.sample(ri);
        }
        return prod;
    }};
}

/// Named parameter point with a tangent direction of the same length.
struct ParamVector {
    std::vector<std::string> names;
    std::vector<double> theta;
    std::vector<double> v;

    ParamVector() = default;
    ParamVector(std::vector<std::string> n, std::vector<double> t)
        : names(std::move(n)), theta(std::move(t)), v(theta.size(), 0.0) {
        validate();
    }
    ParamVector(std::vector<std::string> n, std::vector<double> t, std::vector<double> dir)
        : names(std::move(n)), theta(std::move(t)), v(std::move(dir)) {
        validate();
    }
    std::size_t size() const { return names.size(); }
    void validate() const;
    ParamVector with_direction(std::vector<double> dir) const;
    ParamVector basis_direction(std::size_t i) const;
};

}  // namespace provi
