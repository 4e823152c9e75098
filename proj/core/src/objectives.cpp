#include "provi/objectives.hpp"

#include <cmath>

namespace provi {

namespace {

Dual log_or_dump(const LogWeight& w, const Trace& z, const char* what) {
    if (w.is_zero())
        throw DomainError(std::string(what) + " density is zero at trace " + z.describe());
    return w.log;
}

/// log p(z) - log w_q for one guide draw.
Prob<Dual> particle_log_ratio(const GenPtr& m, const GenPtr& g) {
    return prob_bind(sim_prob(g), [m](const SimResult& s) {
        return prob_bind(density_est_prob(m, s.trace), [s](const LogWeight& wp) {
            const Dual lq = log_or_dump(s.log_weight, s.trace, "guide");
            const Dual lp = log_or_dump(wp, s.trace, "model");
            return prob_return(lp - lq);
        });
    });
}

}  // namespace

LossFn iwelbo(ProgramFn model, ProgramFn guide, int n_particles) {
    if (n_particles < 1) throw DomainError("iwelbo needs n_particles >= 1");
    return [model = std::move(model), guide = std::move(guide),
            n_particles](const Params& ps) -> LossEst {
        const GenPtr m = model(ps);
        const GenPtr g = guide(ps);
        Prob<Dual> obj{[m, g, n_particles](const Prob<Dual>::Cont& k, RngStream& rng) {
            std::vector<Dual> ratios;
            RngStream parts = rng.child(0);
            std::function<Dual(int)> go = [&](int i) -> Dual {
                if (i == n_particles) {
                    const Dual iw =
                        dual_logsumexp(ratios) - std::log(static_cast<double>(n_particles));
                    RngStream rest = rng.child(1);
                    return k(iw, rest);
                }
                RngStream pi = parts.child(static_cast<std::uint64_t>(i));
                return particle_log_ratio(m, g).run(
                    [&](const Dual& r, RngStream&) {
                        ratios.push_back(r);
                        Dual res = go(i + 1);
                        ratios.pop_back();
                        return res;
                    },
                    pi);
            };
            return go(0);
        }};
        return expect(std::move(obj));
    };
}

LossFn elbo(ProgramFn model, ProgramFn guide) {
    return iwelbo(std::move(model), std::move(guide), 1);
}

LossFn qwake(ProgramFn model, ProgramFn guide, int n_particles, ParamVector frozen) {
    if (n_particles < 1) throw DomainError("qwake needs n_particles >= 1");
    return [model = std::move(model), guide = std::move(guide), n_particles,
            frozen = std::move(frozen)](const Params& ps) -> LossEst {
        const Params fps = Params::frozen(frozen);
        const GenPtr sampler =
            gp_normalize(model(fps), ImportanceAlg{guide(fps), n_particles});
        const GenPtr g_live = guide(ps);
        Prob<Dual> obj = prob_bind(sim_prob(sampler), [g_live](const SimResult& s) {
            return prob_bind(density_est_prob(g_live, s.trace), [s](const LogWeight& q) {
                return prob_return(-log_or_dump(q, s.trace, "guide"));
            });
        });
        return expect(std::move(obj));
    };
}

LossFn pwake(ProgramFn model, ProgramFn guide, int n_particles, ParamVector frozen) {
    if (n_particles < 1) throw DomainError("pwake needs n_particles >= 1");
    return [model = std::move(model), guide = std::move(guide), n_particles,
            frozen = std::move(frozen)](const Params& ps) -> LossEst {
        const Params fps = Params::frozen(frozen);
        const GenPtr m_live = model(ps);
        const GenPtr sampler = gp_normalize(m_live, ImportanceAlg{guide(fps), n_particles});
        Prob<Dual> obj = prob_bind(sim_prob(sampler), [m_live](const SimResult& s) {
            const Dual lwq = log_or_dump(s.log_weight, s.trace, "sampler");
            return prob_bind(density_est_prob(m_live, s.trace), [s, lwq](const LogWeight& p) {
                return prob_return(log_or_dump(p, s.trace, "model") - lwq);
            });
        });
        return expect(std::move(obj));
    };
}

LossFn hvi_elbo(ProgramFn model, ProgramFn guide_joint, std::vector<std::string> kept,
                AlgBuilder alg) {
    ProgramFn marg = [guide_joint = std::move(guide_joint), kept = std::move(kept),
                      alg = std::move(alg)](const Params& ps) {
        return gp_marginal(kept, guide_joint(ps), alg(ps));
    };
    return elbo(std::move(model), std::move(marg));
}

}  // namespace provi
