#include "provi/strategies.hpp"

#include <cmath>

namespace provi {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log sqrt(2*pi)

thread_local double g_baseline = 0.0;

bool param_is_live(const RealValue& p) { return p.d.tan != 0.0 || p.d.node >= 0; }

/// Applies the score-function correction for a freshly sampled x: a phantom
/// summand (log q - detach(log q)) * (v - baseline) with value 0, whose
/// tangent is the score term and whose tape graph carries it scaled by any
/// enclosing branch weights. Forward and reverse mode share this expression.
Dual apply_score(const Dist& d, const GroundValue& x, Dual v) {
    const LogWeight lq = dist_log_density(d, x);
    if (lq.is_zero()) throw DomainError("score-function step on a zero-density sample");
    const Dual phantom = (lq.log - detach(lq.log)) * (v.val - g_baseline);
    return v + phantom;
}

}  // namespace

double reinforce_baseline() { return g_baseline; }

BaselineScope::BaselineScope(double b) : prev_(g_baseline) { g_baseline = b; }
BaselineScope::~BaselineScope() { g_baseline = prev_; }

GroundValue dist_simulate(const Dist& d, RngStream& rng, std::string_view origin) {
    const auto& ps = d.params();
    switch (d.family()) {
        case Family::Normal: {
            const double eps = rng.normal();
            if (d.strategy() == StrategyTag::Reparam) {
                // Pathwise sample: tangent (and tape linkage) flows from the
                // parameters through the location shift.
                const Dual x = ps[0].d + ps[1].d * eps;
                return GroundValue::real(RealValue{x, Smoothness::Smooth, std::string(origin)});
            }
            return GroundValue::real(ps[0].d.val + ps[1].d.val * eps, Smoothness::Star);
        }
        case Family::Flip: return GroundValue::boolean(rng.bernoulli(ps[0].d.val));
        case Family::Categorical: {
            std::vector<double> w(ps.size());
            for (std::size_t i = 0; i < ps.size(); ++i) w[i] = ps[i].d.val;
            return GroundValue::integer(static_cast<std::int64_t>(rng.categorical(w)));
        }
        case Family::UniformStar: {
            const double lo = ps[0].d.val, hi = ps[1].d.val;
            return GroundValue::real(lo + (hi - lo) * rng.uniform(), Smoothness::Star);
        }
        case Family::Poisson: return GroundValue::integer(rng.poisson(ps[0].d.val));
        case Family::BetaStar:
            return GroundValue::real(rng.beta(ps[0].d.val, ps[1].d.val), Smoothness::Star);
    }
    throw DomainError("unreachable family");
}

LogWeight dist_log_density(const Dist& d, const GroundValue& x) {
    if (x.type() != d.output_type()) return LogWeight::none();
    const auto& ps = d.params();
    switch (d.family()) {
        case Family::Normal: {
            // Smooth in both parameters and location.
            const Dual z = (x.as_real().d - ps[0].d) / ps[1].d;
            return LogWeight::from_log(make_dual(-kLogSqrt2Pi) - dlog(ps[1].d) - 0.5 * z * z);
        }
        case Family::Flip: {
            const Dual p = x.as_bool() ? ps[0].d : 1.0 - ps[0].d;
            if (p.val <= 0.0) return LogWeight::none();
            return LogWeight::from_log(dlog(p));
        }
        case Family::Categorical: {
            const std::int64_t i = x.as_int();
            if (i < 0 || i >= static_cast<std::int64_t>(ps.size())) return LogWeight::none();
            const Dual p = ps[static_cast<std::size_t>(i)].d;
            if (p.val <= 0.0) return LogWeight::none();
            return LogWeight::from_log(dlog(p));
        }
        case Family::UniformStar: {
            // Density is an indicator in the location: non-smooth consumer.
            check_nonsmooth_use(x, "uniform density");
            const double v = x.as_real().d.val;
            const double lo = ps[0].d.val, hi = ps[1].d.val;
            if (v < lo || v > hi) return LogWeight::none();
            return LogWeight::from_log(make_dual(-std::log(hi - lo)));
        }
        case Family::Poisson: {
            const std::int64_t n = x.as_int();
            if (n < 0) return LogWeight::none();
            const Dual rate = ps[0].d;
            return LogWeight::from_log(static_cast<double>(n) * dlog(rate) - rate -
                                       std::lgamma(static_cast<double>(n) + 1.0));
        }
        case Family::BetaStar: {
            check_nonsmooth_use(x, "beta density");
            const double v = x.as_real().d.val;
            const double a = ps[0].d.val, b = ps[1].d.val;
            if (!(v > 0.0 && v < 1.0)) return LogWeight::none();
            const double logB = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
            return LogWeight::from_log(
                make_dual((a - 1.0) * std::log(v) + (b - 1.0) * std::log(1.0 - v) - logB));
        }
    }
    return LogWeight::none();
}

namespace {

bool branch_dead(const Dual& w) { return w.val == 0.0 && w.tan == 0.0 && w.node < 0; }

/// Weighted enumeration over a finite set of branches: sum_i w_i (x) k(i).
Dual enumerate_branches(const Dist& d, const std::vector<Dual>& weights, const ContD& k,
                        RngStream& rng) {
    Dual acc{};
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (branch_dead(weights[i])) continue;
        RngStream branch = rng.child(i);
        acc = acc + weights[i] * k(d.support_value(i), branch);
    }
    return acc;
}

}  // namespace

Dual dist_estimate(const Dist& d, std::string_view name, const ContD& k, RngStream& rng) {
    const auto& ps = d.params();
    switch (d.family()) {
        case Family::Normal: {
            if (d.strategy() == StrategyTag::Reparam) return k(dist_simulate(d, rng, name), rng);
            const GroundValue x = dist_simulate(d, rng, name);
            return apply_score(d, x, k(x, rng));
        }
        case Family::Flip: {
            if (d.strategy() == StrategyTag::Enum)
                return enumerate_branches(d, {ps[0].d, 1.0 - ps[0].d}, k, rng);
            if (d.strategy() == StrategyTag::Mvd) {
                const bool b = rng.bernoulli(ps[0].d.val);
                RngStream value_stream = rng.child(0);
                const Dual v = k(GroundValue::boolean(b), value_stream);
                // Both branches on one substream: common random numbers for
                // the weak-derivative difference. Only the branch values
                // enter; their own derivative terms are discarded.
                RngStream ct = rng.child(1);
                RngStream cf = rng.child(1);
                const double diff = k(GroundValue::boolean(true), ct).val -
                                    k(GroundValue::boolean(false), cf).val;
                const Dual p = ps[0].d;
                return v + (p - detach(p)) * diff;
            }
            // REINFORCE
            const double p = ps[0].d.val;
            if ((p <= 0.0 || p >= 1.0) && param_is_live(ps[0]))
                throw DomainError("flip reinforce: score undefined at p in {0,1}");
            const GroundValue x = dist_simulate(d, rng, name);
            return apply_score(d, x, k(x, rng));
        }
        case Family::Categorical: {
            if (d.strategy() == StrategyTag::Enum) {
                std::vector<Dual> w(ps.size());
                for (std::size_t i = 0; i < ps.size(); ++i) w[i] = ps[i].d;
                return enumerate_branches(d, w, k, rng);
            }
            const GroundValue x = dist_simulate(d, rng, name);
            return apply_score(d, x, k(x, rng));
        }
        case Family::Poisson: {
            const GroundValue x = dist_simulate(d, rng, name);
            return apply_score(d, x, k(x, rng));
        }
        case Family::UniformStar:
        case Family::BetaStar:
            // Star output, Star parameters: nothing to propagate.
            return k(dist_simulate(d, rng, name), rng);
    }
    throw DomainError("unreachable family");
}

}  // namespace provi
