#include "provi/gen.hpp"

#include <cmath>

#include "provi/strategies.hpp"

namespace provi {

GenPtr gp_return(GroundValue v) {
    return std::make_shared<Gen>(Gen::Return{std::move(v)});
}

GenPtr gp_sample(Dist d, std::string name, GenCont cont) {
    if (name.empty()) throw DomainError("sample needs a non-empty address name");
    return std::make_shared<Gen>(Gen::Sample{std::move(d), std::move(name), std::move(cont)});
}

GenPtr gp_observe(Dist d, GroundValue y, GenPtr rest) {
    if (y.type() != d.output_type())
        throw TypeError(std::string("observe: value type ") + to_string(y.type()) +
                        " does not match " + to_string(d.family()) + " support");
    return std::make_shared<Gen>(Gen::Observe{std::move(d), std::move(y), std::move(rest)});
}

GenPtr gp_marginal(std::vector<std::string> kept, GenPtr inner, AlgFn alg) {
    if (kept.empty()) throw DomainError("marginal needs at least one kept name");
    return std::make_shared<Gen>(Gen::Marginal{std::move(kept), std::move(inner), std::move(alg)});
}

GenPtr gp_normalize(GenPtr inner, ImportanceAlg alg) {
    if (alg.n_particles < 1) throw DomainError("normalize needs n_particles >= 1");
    return std::make_shared<Gen>(Gen::Normalize{std::move(inner), std::move(alg)});
}

double Enumeration::total_mass() const {
    double m = 0.0;
    for (const auto& e : entries) m += e.density;
    return m;
}

const Enumeration::Entry* Enumeration::find(const Trace& t) const {
    for (const auto& e : entries)
        if (e.trace.same_mapping(t)) return &e;
    return nullptr;
}

namespace {

void enumerate_walk(const GenPtr& p, const Trace& trace, double mass, Enumeration& out) {
    const auto& node = p->node();
    if (const auto* ret = std::get_if<Gen::Return>(&node)) {
        out.entries.push_back({trace, mass, ret->value});
        return;
    }
    if (const auto* obs = std::get_if<Gen::Observe>(&node)) {
        const LogWeight lw = dist_log_density(obs->dist, obs->observed);
        if (lw.is_zero()) return;  // impossible observation: path carries no mass
        enumerate_walk(obs->rest, trace, mass * std::exp(lw.log.val), out);
        return;
    }
    if (const auto* smp = std::get_if<Gen::Sample>(&node)) {
        if (!smp->dist.finite_support())
            throw UnsupportedError("enumerate_discrete: '" + smp->name +
                                   "' samples an infinite-support primitive");
        if (trace.contains(smp->name)) {
            // Reused address: the execution is an error and its mass is 0.
            out.duplicate_names = true;
            return;
        }
        for (std::size_t i = 0; i < smp->dist.support_size(); ++i) {
            const GroundValue v = smp->dist.support_value(i);
            const LogWeight lw = dist_log_density(smp->dist, v);
            if (lw.is_zero()) continue;
            enumerate_walk(smp->cont(v), trace.with(smp->name, v),
                           mass * std::exp(lw.log.val), out);
        }
        return;
    }
    throw UnsupportedError("enumerate_discrete: program contains estimator nodes");
}

}  // namespace

Enumeration enumerate_discrete(const GenPtr& p) {
    Enumeration out;
    enumerate_walk(p, Trace{}, 1.0, out);
    return out;
}

}  // namespace provi
