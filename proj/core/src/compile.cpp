#include "provi/compile.hpp"

#include <set>

#include "provi/marginal.hpp"

namespace provi {

namespace {

// Popped values keep their dual components: a trace produced by a
// simulator carries pathwise tangents, and the smooth-in-location
// primitive densities propagate them. Externally supplied traces have
// zero tangents, so their densities differentiate in the parameters only.

struct DensityWalkState {
    Trace remaining;
    LogWeight lw = LogWeight::one();
    std::vector<std::string> consumed;
    std::string missed_address;
};

GroundValue density_walk(const GenPtr& p, DensityWalkState& st) {
    const auto& node = p->node();
    if (const auto* ret = std::get_if<Gen::Return>(&node)) return ret->value;
    if (const auto* smp = std::get_if<Gen::Sample>(&node)) {
        PopResult pr = trace_pop(st.remaining, smp->name, smp->dist.output_type());
        const GroundValue x = pr.value;
        st.remaining = std::move(pr.rest);
        if (pr.weight == 0.0) {
            st.lw = LogWeight::none();
            if (st.missed_address.empty()) st.missed_address = smp->name;
        } else {
            st.consumed.push_back(smp->name);
            st.lw *= dist_log_density(smp->dist, x);
        }
        // Once the weight hits zero the density is zero whatever follows;
        // stop before the continuation can see out-of-support values.
        if (st.lw.is_zero()) return GroundValue::unit();
        return density_walk(smp->cont(x), st);
    }
    if (const auto* obs = std::get_if<Gen::Observe>(&node)) {
        st.lw *= dist_log_density(obs->dist, obs->observed);
        if (st.lw.is_zero()) return GroundValue::unit();
        return density_walk(obs->rest, st);
    }
    throw UnsupportedError("exact density unavailable: program contains estimator nodes");
}

}  // namespace

DensityResult density_eval(const GenPtr& p, const Trace& u) {
    DensityWalkState st;
    st.remaining = u;
    GroundValue rv = density_walk(p, st);
    return DensityResult{std::move(rv), st.lw, std::move(st.remaining), std::move(st.consumed),
                         std::move(st.missed_address)};
}

LogWeight log_density(const GenPtr& p, const Trace& u) {
    DensityResult r = density_eval(p, u);
    if (!r.remainder.empty()) return LogWeight::none();
    return r.log_weight;
}

Dual density(const GenPtr& p, const Trace& u) { return log_density(p, u).linear(); }

namespace {

struct SimWalkState {
    Trace tr;
    LogWeight lw = LogWeight::one();
};

GroundValue simulate_walk(const GenPtr& p, SimWalkState& st, RngStream& rng) {
    const auto& node = p->node();
    if (const auto* ret = std::get_if<Gen::Return>(&node)) return ret->value;
    if (const auto* smp = std::get_if<Gen::Sample>(&node)) {
        if (st.tr.contains(smp->name)) throw DuplicateNameError(smp->name);
        const GroundValue x = dist_simulate(smp->dist, rng, smp->name);
        st.lw *= dist_log_density(smp->dist, x);
        st.tr = st.tr.with(smp->name, x);
        return simulate_walk(smp->cont(x), st, rng);
    }
    if (const auto* obs = std::get_if<Gen::Observe>(&node)) {
        st.lw *= dist_log_density(obs->dist, obs->observed);
        return simulate_walk(obs->rest, st, rng);
    }
    if (const auto* mar = std::get_if<Gen::Marginal>(&node)) {
        SimResult r = marginal_simulate(*mar, rng);
        st.tr = trace_concat(st.tr, r.trace);
        st.lw *= r.log_weight;
        return r.retval;
    }
    const auto& nrm = std::get<Gen::Normalize>(node);
    SimResult r = normalize_simulate(nrm, rng);
    st.tr = trace_concat(st.tr, r.trace);
    st.lw *= r.log_weight;
    return r.retval;
}

}  // namespace

SimResult simulate(const GenPtr& p, RngStream& rng) {
    SimWalkState st;
    GroundValue rv = simulate_walk(p, st, rng);
    return SimResult{std::move(st.tr), st.lw, std::move(rv)};
}

namespace {

Dual sim_walk_cps(const GenPtr& p, const Trace& tr, const LogWeight& lw,
                  const Prob<SimResult>::Cont& k, RngStream& rng) {
    const auto& node = p->node();
    if (const auto* ret = std::get_if<Gen::Return>(&node))
        return k(SimResult{tr, lw, ret->value}, rng);
    if (const auto* smp = std::get_if<Gen::Sample>(&node)) {
        if (tr.contains(smp->name)) throw DuplicateNameError(smp->name);
        return dist_estimate(
            smp->dist, smp->name,
            [&, p](const GroundValue& x, RngStream& r) {
                const LogWeight lw2 = lw * dist_log_density(smp->dist, x);
                return sim_walk_cps(smp->cont(x), tr.with(smp->name, x), lw2, k, r);
            },
            rng);
    }
    if (const auto* obs = std::get_if<Gen::Observe>(&node)) {
        const LogWeight f = dist_log_density(obs->dist, obs->observed);
        // The observation both reweights the represented measure (score)
        // and multiplies the recorded weight.
        if (f.is_zero()) return Dual{};
        return f.linear() * sim_walk_cps(obs->rest, tr, lw * f, k, rng);
    }
    if (const auto* mar = std::get_if<Gen::Marginal>(&node)) {
        return marginal_sim(*mar).run(
            [&](const SimResult& r, RngStream& r2) {
                return k(SimResult{trace_concat(tr, r.trace), lw * r.log_weight, r.retval}, r2);
            },
            rng);
    }
    const auto& nrm = std::get<Gen::Normalize>(node);
    return normalize_sim(nrm).run(
        [&](const SimResult& r, RngStream& r2) {
            return k(SimResult{trace_concat(tr, r.trace), lw * r.log_weight, r.retval}, r2);
        },
        rng);
}

Dual density_est_walk(const GenPtr& p, const Trace& remaining, const LogWeight& lw,
                      const Prob<LogWeight>::Cont& k, RngStream& rng) {
    const auto& node = p->node();
    if (std::get_if<Gen::Return>(&node) != nullptr) {
        if (!remaining.empty()) return k(LogWeight::none(), rng);
        return k(lw, rng);
    }
    if (const auto* smp = std::get_if<Gen::Sample>(&node)) {
        PopResult pr = trace_pop(remaining, smp->name, smp->dist.output_type());
        const GroundValue x = pr.value;
        LogWeight lw2 = lw;
        if (pr.weight == 0.0)
            lw2 = LogWeight::none();
        else
            lw2 *= dist_log_density(smp->dist, x);
        if (lw2.is_zero()) return k(LogWeight::none(), rng);
        return density_est_walk(smp->cont(x), pr.rest, lw2, k, rng);
    }
    if (const auto* obs = std::get_if<Gen::Observe>(&node)) {
        const LogWeight lw2 = lw * dist_log_density(obs->dist, obs->observed);
        if (lw2.is_zero()) return k(LogWeight::none(), rng);
        return density_est_walk(obs->rest, remaining, lw2, k, rng);
    }
    if (const auto* mar = std::get_if<Gen::Marginal>(&node)) {
        std::set<std::string> kept_set(mar->kept.begin(), mar->kept.end());
        auto parts = trace_subtrace_remainder(remaining, kept_set);
        const Trace& kept_tr = parts.first;
        const Trace& rest = parts.second;
        if (kept_tr.size() != mar->kept.size()) return k(LogWeight::none(), rng);
        return marginal_density_est(*mar, kept_tr)
            .run(
                [&](const LogWeight& est, RngStream& r2) {
                    if (!rest.empty()) return k(LogWeight::none(), r2);
                    return k(lw * est, r2);
                },
                rng);
    }
    const auto& nrm = std::get<Gen::Normalize>(node);
    return normalize_density_est(nrm, remaining)
        .run([&](const LogWeight& est, RngStream& r2) { return k(lw * est, r2); }, rng);
}

}  // namespace

Prob<SimResult> sim_prob(const GenPtr& p) {
    return Prob<SimResult>{[p](const Prob<SimResult>::Cont& k, RngStream& rng) {
        return sim_walk_cps(p, Trace{}, LogWeight::one(), k, rng);
    }};
}

Prob<LogWeight> density_est_prob(const GenPtr& p, const Trace& u) {
    return Prob<LogWeight>{[p, u](const Prob<LogWeight>::Cont& k, RngStream& rng) {
        return density_est_walk(p, u, LogWeight::one(), k, rng);
    }};
}

Dual density_estimate_sample(const GenPtr& p, const Trace& u, RngStream& rng) {
    return density_est_prob(p, u).run(
        [](const LogWeight& w, RngStream&) { return w.linear(); }, rng);
}

}  // namespace provi
