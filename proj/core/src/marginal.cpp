#include "provi/marginal.hpp"

#include <cmath>
#include <functional>
#include <set>

namespace provi {

namespace {

std::set<std::string> name_set(const std::vector<std::string>& names) {
    return {names.begin(), names.end()};
}

/// Joint density of the target at a particle's full trace. A mismatch
/// between the proposal's address space and the target's is a wiring error,
/// not a zero: an address the target pops but the particle lacks, or
/// particle names the target never consumed (when the walk completed).
Prob<LogWeight> joint_density_checked(const GenPtr& inner, const Trace& full) {
    try {
        DensityResult r = density_eval(inner, full);
        if (!r.missed_address.empty())
            throw DomainError("importance target address '" + r.missed_address +
                              "' missing from the proposal trace");
        if (!r.remainder.empty()) {
            if (!r.log_weight.is_zero())
                throw DomainError("importance target did not consume proposed names " +
                                  r.remainder.describe());
            return prob_return(LogWeight::none());
        }
        return prob_return(r.log_weight);
    } catch (const UnsupportedError&) {
        return density_est_prob(inner, full);
    }
}

/// One unconditional importance particle: weight = target(kept ++ aux) / q(aux).
Prob<LogWeight> importance_particle(const GenPtr& inner, const GenPtr& proposal,
                                    const Trace& kept) {
    return Prob<LogWeight>{[inner, proposal, kept](const Prob<LogWeight>::Cont& k,
                                                   RngStream& rng) {
        return sim_prob(proposal).run(
            [&](const SimResult& aux, RngStream& r2) {
                if (aux.log_weight.is_zero()) return k(LogWeight::none(), r2);
                const Trace full = trace_concat(kept, aux.trace);
                return joint_density_checked(inner, full)
                    .run(
                        [&](const LogWeight& joint, RngStream& r3) {
                            if (joint.is_zero()) return k(LogWeight::none(), r3);
                            return k(joint / aux.log_weight, r3);
                        },
                        r2);
            },
            rng);
    }};
}

/// CPS chain over n independent particles, particle i on parent.child(i).
Dual run_particles(int n, const std::function<Prob<LogWeight>(int)>& make, RngStream parent,
                   const std::function<Dual(const std::vector<LogWeight>&)>& done) {
    std::vector<LogWeight> acc;
    std::function<Dual(int)> go = [&](int i) -> Dual {
        if (i == n) return done(acc);
        RngStream pi = parent.child(static_cast<std::uint64_t>(i));
        return make(i).run(
            [&](const LogWeight& w, RngStream&) {
                acc.push_back(w);
                Dual r = go(i + 1);
                acc.pop_back();
                return r;
            },
            pi);
    };
    return go(0);
}

}  // namespace

Prob<LogWeight> marginal_density_est(const Gen::Marginal& m, const Trace& kept_values) {
    GenPtr inner = m.inner;
    AlgFn alg = m.alg;
    Trace kept = kept_values;
    return Prob<LogWeight>{[inner, alg, kept](const Prob<LogWeight>::Cont& k, RngStream& rng) {
        const ImportanceAlg ia = alg(kept);
        RngStream parts = rng.child(0);
        return run_particles(
            ia.n_particles, [&](int) { return importance_particle(inner, ia.proposal, kept); },
            parts, [&](const std::vector<LogWeight>& ws) {
                RngStream rest = rng.child(1);
                return k(lse_mean(ws), rest);
            });
    }};
}

Prob<SimResult> marginal_sim(const Gen::Marginal& m) {
    GenPtr inner = m.inner;
    AlgFn alg = m.alg;
    std::vector<std::string> kept_names = m.kept;
    return Prob<SimResult>{[inner, alg, kept_names](const Prob<SimResult>::Cont& k,
                                                    RngStream& rng) {
        RngStream inner_rng = rng.child(0);
        return sim_prob(inner).run(
            [&](const SimResult& full, RngStream&) {
                auto split = trace_subtrace_remainder(full.trace, name_set(kept_names));
                const Trace kept_tr = split.first;
                const Trace aux_tr = split.second;
                if (kept_tr.size() != kept_names.size())
                    throw DomainError("marginal: kept name missing from inner trace");
                const ImportanceAlg ia = alg(kept_tr);
                RngStream aux_rng = rng.child(1);
                // Retained particle: the auxiliaries actually sampled above.
                return density_est_prob(ia.proposal, aux_tr)
                    .run(
                        [&](const LogWeight& qaux, RngStream&) {
                            if (qaux.is_zero())
                                throw DomainError(
                                    "marginal: proposal has zero density at retained "
                                    "auxiliaries " +
                                    aux_tr.describe());
                            const LogWeight retained = full.log_weight / qaux;
                            RngStream parts = rng.child(2);
                            return run_particles(
                                ia.n_particles - 1,
                                [&](int) {
                                    return importance_particle(inner, ia.proposal, kept_tr);
                                },
                                parts, [&](const std::vector<LogWeight>& ws) {
                                    std::vector<LogWeight> all;
                                    all.reserve(ws.size() + 1);
                                    all.push_back(retained);
                                    all.insert(all.end(), ws.begin(), ws.end());
                                    RngStream rest = rng.child(3);
                                    return k(SimResult{kept_tr, lse_mean(all),
                                                       GroundValue::unit()},
                                             rest);
                                });
                        },
                        aux_rng);
            },
            inner_rng);
    }};
}

Prob<LogWeight> normalize_density_est(const Gen::Normalize& n, const Trace& u) {
    GenPtr inner = n.inner;
    ImportanceAlg ia = n.alg;
    Trace cand = u;
    return Prob<LogWeight>{[inner, ia, cand](const Prob<LogWeight>::Cont& k, RngStream& rng) {
        RngStream unnorm_rng = rng.child(0);
        return density_est_prob(inner, cand).run(
            [&](const LogWeight& unnorm_u, RngStream&) {
                if (unnorm_u.is_zero()) {
                    RngStream rest = rng.child(3);
                    return k(LogWeight::none(), rest);
                }
                RngStream prop_rng = rng.child(1);
                return density_est_prob(ia.proposal, cand)
                    .run(
                        [&](const LogWeight& qu, RngStream&) {
                            if (qu.is_zero())
                                throw DomainError(
                                    "normalize: proposal has zero density at conditioned trace " +
                                    cand.describe());
                            const LogWeight retained = unnorm_u / qu;
                            RngStream parts = rng.child(2);
                            return run_particles(
                                ia.n_particles - 1,
                                [&](int) {
                                    return importance_particle(inner, ia.proposal, Trace{});
                                },
                                parts, [&](const std::vector<LogWeight>& ws) {
                                    std::vector<LogWeight> all;
                                    all.reserve(ws.size() + 1);
                                    all.push_back(retained);
                                    all.insert(all.end(), ws.begin(), ws.end());
                                    RngStream rest = rng.child(3);
                                    return k(unnorm_u / lse_mean(all), rest);
                                });
                        },
                        prop_rng);
            },
            unnorm_rng);
    }};
}

Prob<SimResult> normalize_sim(const Gen::Normalize& n) {
    GenPtr inner = n.inner;
    ImportanceAlg ia = n.alg;
    return Prob<SimResult>{[inner, ia](const Prob<SimResult>::Cont& k, RngStream& rng) {
        struct Part {
            Trace z;
            LogWeight w;
            LogWeight unnorm;
        };
        std::vector<Part> acc;
        RngStream parts = rng.child(0);
        std::function<Dual(int)> go = [&](int i) -> Dual {
            if (i == ia.n_particles) {
                std::vector<LogWeight> ws;
                ws.reserve(acc.size());
                bool any = false;
                for (const auto& p : acc) {
                    ws.push_back(p.w);
                    any = any || !p.w.is_zero();
                }
                if (!any) throw DomainError("normalize: all importance weights are zero");
                const LogWeight avg = lse_mean(ws);
                const Dual log_total = avg.log + std::log(static_cast<double>(ws.size()));
                std::vector<RealValue> probs;
                probs.reserve(ws.size());
                for (const auto& w : ws) {
                    Dual p = w.is_zero() ? Dual{} : dexp(w.log - log_total);
                    probs.push_back(RealValue{p, Smoothness::Smooth, "sir-weight"});
                }
                // The selection is enumerated so gradients through the
                // resampling weights are exact.
                const Dist resample = Dist::categorical(std::move(probs), StrategyTag::Enum);
                RngStream sel = rng.child(1);
                return dist_estimate(resample, "sir-resample",
                                     [&](const GroundValue& idx, RngStream& r2) {
                                         const Part& c = acc[static_cast<std::size_t>(idx.as_int())];
                                         return k(SimResult{c.z, c.unnorm / avg,
                                                            GroundValue::unit()},
                                                  r2);
                                     },
                                     sel);
            }
            RngStream pi = parts.child(static_cast<std::uint64_t>(i));
            return sim_prob(ia.proposal)
                .run(
                    [&](const SimResult& prop, RngStream& r2) {
                        return joint_density_checked(inner, prop.trace)
                            .run(
                                [&](const LogWeight& unnorm, RngStream&) {
                                    Part part{prop.trace,
                                              (unnorm.is_zero() || prop.log_weight.is_zero())
                                                  ? LogWeight::none()
                                                  : unnorm / prop.log_weight,
                                              unnorm};
                                    acc.push_back(std::move(part));
                                    Dual r = go(i + 1);
                                    acc.pop_back();
                                    return r;
                                },
                                r2);
                    },
                    pi);
        };
        return go(0);
    }};
}

namespace {

LogWeight joint_checked_plain(const GenPtr& inner, const Trace& full) {
    DensityResult r = density_eval(inner, full);
    if (!r.missed_address.empty())
        throw DomainError("importance target address '" + r.missed_address +
                          "' missing from the proposal trace");
    if (!r.remainder.empty()) {
        if (!r.log_weight.is_zero())
            throw DomainError("importance target did not consume proposed names " +
                              r.remainder.describe());
        return LogWeight::none();
    }
    return r.log_weight;
}

}  // namespace

SimResult marginal_simulate(const Gen::Marginal& m, RngStream& rng) {
    const SimResult full = simulate(m.inner, rng);
    auto split = trace_subtrace_remainder(full.trace, name_set(m.kept));
    const Trace kept_tr = split.first;
    const Trace aux_tr = split.second;
    if (kept_tr.size() != m.kept.size())
        throw DomainError("marginal: kept name missing from inner trace");
    const ImportanceAlg ia = m.alg(kept_tr);
    const LogWeight qaux = log_density(ia.proposal, aux_tr);
    if (qaux.is_zero())
        throw DomainError("marginal: proposal has zero density at retained auxiliaries");
    std::vector<LogWeight> ws{full.log_weight / qaux};
    for (int i = 1; i < ia.n_particles; ++i) {
        const SimResult prop = simulate(ia.proposal, rng);
        const LogWeight joint = joint_checked_plain(m.inner, trace_concat(kept_tr, prop.trace));
        ws.push_back(joint.is_zero() || prop.log_weight.is_zero() ? LogWeight::none()
                                                                  : joint / prop.log_weight);
    }
    return SimResult{kept_tr, lse_mean(ws), GroundValue::unit()};
}

SimResult normalize_simulate(const Gen::Normalize& n, RngStream& rng) {
    std::vector<Trace> zs;
    std::vector<LogWeight> ws, unnorms;
    double max_log = 0.0;
    bool any = false;
    for (int i = 0; i < n.alg.n_particles; ++i) {
        const SimResult prop = simulate(n.alg.proposal, rng);
        const LogWeight unnorm = joint_checked_plain(n.inner, prop.trace);
        const LogWeight w = unnorm.is_zero() || prop.log_weight.is_zero()
                                ? LogWeight::none()
                                : unnorm / prop.log_weight;
        zs.push_back(prop.trace);
        unnorms.push_back(unnorm);
        ws.push_back(w);
        if (!w.is_zero() && (!any || w.log.val > max_log)) {
            max_log = w.log.val;
            any = true;
        }
    }
    if (!any) throw DomainError("normalize: all importance weights are zero");
    std::vector<double> linear(ws.size(), 0.0);
    for (std::size_t i = 0; i < ws.size(); ++i)
        if (!ws[i].is_zero()) linear[i] = std::exp(ws[i].log.val - max_log);
    const std::size_t j = rng.categorical(linear);
    return SimResult{zs[j], unnorms[j] / lse_mean(ws), GroundValue::unit()};
}

}  // namespace provi
