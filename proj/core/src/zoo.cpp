#include "provi/zoo.hpp"

#include <cmath>

namespace provi {

namespace {

constexpr double kTwoPi = 6.283185307179586;

RealValue param_or(const Params& ps, const std::string& name, double def) {
    if (ps.contains(name)) return ps[name];
    return star_real(def);
}

RealValue rv_sigmoid(const RealValue& x) {
    const RealValue one = star_real(1.0);
    return rv_div(one, rv_add(one, rv_exp(rv_neg(x))));
}

StrategyTag pick(const StrategyOverrides& ov, const std::string& addr, StrategyTag def) {
    auto it = ov.find(addr);
    return it == ov.end() ? def : it->second;
}

double log_beta_fn(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// ---- twoflip: two independent fair coins --------------------------------

ZooEntry make_twoflip() {
    ZooEntry e;
    e.id = "twoflip";
    e.blurb = "two independent fair flips, no conditioning";
    e.model = [](const Params&) {
        return gp_sample(Dist::flip(star_real(0.5)), "c1", [](const GroundValue& c1) {
            return gp_sample(Dist::flip(star_real(0.5)), "c2", [c1](const GroundValue& c2) {
                return gp_return(GroundValue::tuple({c1, c2}));
            });
        });
    };
    e.analytic["evidence"] = 1.0;
    return e;
}

// ---- twoflip_obs: a flip reweighted by a flip likelihood -----------------

ZooEntry make_twoflip_obs() {
    ZooEntry e;
    e.id = "twoflip_obs";
    e.blurb = "flip(0.3) observed through flip(0.9); evidence 0.34";
    e.model = [](const Params&) {
        return gp_sample(Dist::flip(star_real(0.3)), "c", [](const GroundValue& c) {
            return gp_observe(Dist::flip(star_real(0.9)), c, gp_return(c));
        });
    };
    e.analytic["evidence"] = 0.3 * 0.9 + 0.7 * 0.1;
    return e;
}

// ---- twoflip_post: discrete posterior target with trainable guide --------

ZooEntry make_twoflip_post() {
    ZooEntry e;
    e.id = "twoflip_post";
    e.blurb = "two dependent flips conditioned through a flip likelihood";
    e.model = [](const Params&) {
        return gp_sample(Dist::flip(star_real(0.6)), "c1", [](const GroundValue& c1) {
            const double p2 = c1.as_bool() ? 0.7 : 0.2;
            return gp_sample(Dist::flip(star_real(p2)), "c2", [c1](const GroundValue& c2) {
                const double pobs = c2.as_bool() ? 0.8 : 0.3;
                return gp_observe(Dist::flip(star_real(pobs)), GroundValue::boolean(true),
                                  gp_return(GroundValue::tuple({c1, c2})));
            });
        });
    };
    e.guides["naive"] = [](const Params& ps, const StrategyOverrides& ov) {
        const StrategyTag t1 = pick(ov, "c1", StrategyTag::Enum);
        const StrategyTag t2 = pick(ov, "c2", StrategyTag::Enum);
        const RealValue p1 = rv_sigmoid(param_or(ps, "g1", 0.0));
        const RealValue p2t = rv_sigmoid(param_or(ps, "g2t", 0.0));
        const RealValue p2f = rv_sigmoid(param_or(ps, "g2f", 0.0));
        return gp_sample(Dist::flip(p1, t1), "c1", [p2t, p2f, t2](const GroundValue& c1) {
            return gp_sample(Dist::flip(c1.as_bool() ? p2t : p2f, t2), "c2",
                             [c1](const GroundValue& c2) {
                                 return gp_return(GroundValue::tuple({c1, c2}));
                             });
        });
    };
    e.guides["joint"] = [](const Params& ps, const StrategyOverrides& ov) {
        const StrategyTag ta = pick(ov, "a", StrategyTag::Enum);
        const StrategyTag t1 = pick(ov, "c1", StrategyTag::Enum);
        const StrategyTag t2 = pick(ov, "c2", StrategyTag::Enum);
        const RealValue p1t = rv_sigmoid(param_or(ps, "h1t", 0.4));
        const RealValue p1f = rv_sigmoid(param_or(ps, "h1f", -0.4));
        const RealValue p2t = rv_sigmoid(param_or(ps, "h2t", 0.3));
        const RealValue p2f = rv_sigmoid(param_or(ps, "h2f", -0.3));
        return gp_sample(
            Dist::flip(star_real(0.5), ta), "a",
            [p1t, p1f, p2t, p2f, t1, t2](const GroundValue& a) {
                const bool av = a.as_bool();
                return gp_sample(
                    Dist::flip(av ? p1t : p1f, t1), "c1",
                    [p2t, p2f, t2, av](const GroundValue& c1) {
                        return gp_sample(Dist::flip(av ? p2t : p2f, t2), "c2",
                                         [c1](const GroundValue& c2) {
                                             return gp_return(GroundValue::tuple({c1, c2}));
                                         });
                    });
            });
    };
    e.default_guide = "naive";
    e.init = ParamVector({"g1", "g2t", "g2f"}, {0.0, 0.0, 0.0});
    e.hvi_guide = "joint";
    e.hvi_kept = {"c1", "c2"};
    e.hvi_init = ParamVector({"h1t", "h1f", "h2t", "h2f"}, {0.4, -0.4, 0.3, -0.3});
    e.hvi_alg = [](const Params&, int n) -> AlgFn {
        return [n](const Trace&) {
            // Sampled, not enumerated: enumeration would branch every
            // particle and the cost multiplies across the particle set.
            GenPtr prop = gp_sample(Dist::flip(star_real(0.5), StrategyTag::Reinforce), "a",
                                    [](const GroundValue& a) { return gp_return(a); });
            return ImportanceAlg{std::move(prop), n};
        };
    };
    return e;
}

// ---- conj: conjugate Gaussian with analytic posterior --------------------

ZooEntry make_conj() {
    ZooEntry e;
    e.id = "conj";
    e.blurb = "normal prior, normal likelihood at y0=1; posterior N(0.5, 1/sqrt(2))";
    const double y0 = 1.0;
    e.model = [y0](const Params& ps) {
        const RealValue pm = param_or(ps, "pm", 0.0);
        return gp_sample(Dist::normal(pm, star_real(1.0), StrategyTag::Reinforce), "x",
                         [y0](const GroundValue& x) {
                             return gp_observe(Dist::normal(x.as_real(), star_real(1.0)),
                                               GroundValue::real(y0), gp_return(x));
                         });
    };
    auto gaussian_guide = [](StrategyTag def) {
        return [def](const Params& ps, const StrategyOverrides& ov) {
            const RealValue m = param_or(ps, "m", 0.0);
            const RealValue s = param_or(ps, "s", 1.0);
            return gp_sample(Dist::normal(m, s, pick(ov, "x", def)), "x",
                             [](const GroundValue& x) { return gp_return(x); });
        };
    };
    e.guides["naive"] = gaussian_guide(StrategyTag::Reparam);
    e.guides["reinforce"] = gaussian_guide(StrategyTag::Reinforce);
    e.default_guide = "naive";
    e.init = ParamVector({"m", "s"}, {0.0, 1.0});
    e.analytic["log_evidence"] = -0.25 - 0.5 * std::log(4.0 * 3.141592653589793);
    e.analytic["post_m"] = 0.5;
    e.analytic["post_s"] = 1.0 / std::sqrt(2.0);
    return e;
}

// ---- cone: 2D latents observed through their squared radius --------------

ZooEntry make_cone() {
    ZooEntry e;
    e.id = "cone";
    e.blurb = "x,y ~ N(0,2); observe x^2+y^2 = 5 with noise; ring posterior";
    e.model = [](const Params&) {
        return gp_sample(
            Dist::normal(star_real(0.0), star_real(2.0), StrategyTag::Reinforce), "x",
            [](const GroundValue& x) {
                return gp_sample(
                    Dist::normal(star_real(0.0), star_real(2.0), StrategyTag::Reinforce), "y",
                    [x](const GroundValue& y) {
                        const RealValue xr = x.as_real();
                        const RealValue yr = y.as_real();
                        const RealValue r2 = rv_add(rv_mul(xr, xr), rv_mul(yr, yr));
                        return gp_observe(Dist::normal(r2, star_real(0.5)),
                                          GroundValue::real(5.0),
                                          gp_return(GroundValue::tuple({x, y})));
                    });
            });
    };
    auto naive = [](const Params& ps, const StrategyOverrides& ov) {
        const RealValue mx = param_or(ps, "qmx", 1.0);
        const RealValue my = param_or(ps, "qmy", 1.0);
        const RealValue sx = rv_exp(param_or(ps, "qlsx", std::log(0.8)));
        const RealValue sy = rv_exp(param_or(ps, "qlsy", std::log(0.8)));
        const StrategyTag tx = pick(ov, "x", StrategyTag::Reparam);
        const StrategyTag ty = pick(ov, "y", StrategyTag::Reparam);
        return gp_sample(Dist::normal(mx, sx, tx), "x", [my, sy, ty](const GroundValue& x) {
            return gp_sample(Dist::normal(my, sy, ty), "y", [x](const GroundValue& y) {
                return gp_return(GroundValue::tuple({x, y}));
            });
        });
    };
    e.guides["naive"] = naive;
    e.guides["joint"] = [](const Params& ps, const StrategyOverrides& ov) {
        const RealValue r = param_or(ps, "qr", 2.0);
        const RealValue s = rv_exp(param_or(ps, "qjls", std::log(0.5)));
        const StrategyTag tx = pick(ov, "x", StrategyTag::Reparam);
        const StrategyTag ty = pick(ov, "y", StrategyTag::Reparam);
        return gp_sample(
            Dist::uniform_star(star_real(0.0), star_real(kTwoPi)), "v",
            [r, s, tx, ty](const GroundValue& v) {
                const RealValue vr = v.as_real();
                return gp_sample(
                    Dist::normal(rv_mul(r, rv_cos(vr)), s, tx), "x",
                    [r, s, ty, vr](const GroundValue& x) {
                        return gp_sample(Dist::normal(rv_mul(r, rv_sin(vr)), s, ty), "y",
                                         [x](const GroundValue& y) {
                                             return gp_return(GroundValue::tuple({x, y}));
                                         });
                    });
            });
    };
    ProgramFn model = e.model;
    e.guides["sir"] = [model, naive](const Params& ps, const StrategyOverrides& ov) {
        return gp_normalize(model(ps), ImportanceAlg{naive(ps, ov), 8});
    };
    e.default_guide = "naive";
    e.init = ParamVector({"qmx", "qmy", "qlsx", "qlsy", "qr", "qjls"},
                         {1.0, 1.0, std::log(0.8), std::log(0.8), 2.0, std::log(0.5)});
    e.hvi_guide = "joint";
    e.hvi_kept = {"x", "y"};
    e.hvi_init = ParamVector({"qr", "qjls"}, {2.0, -0.6931471805599453});
    e.hvi_alg = [](const Params&, int n) -> AlgFn {
        return [n](const Trace&) {
            GenPtr prop = gp_sample(Dist::uniform_star(star_real(0.0), star_real(kTwoPi)), "v",
                                    [](const GroundValue& v) { return gp_return(v); });
            return ImportanceAlg{std::move(prop), n};
        };
    };
    return e;
}

// ---- coin: latent fairness observed through 10 flips ---------------------

ZooEntry make_coin() {
    ZooEntry e;
    e.id = "coin";
    e.blurb = "beta(10,10) fairness, 10 flips (6 heads); conjugate posterior beta(16,14)";
    const std::vector<bool> flips = {true, true, false, true, false,
                                     true, true, false, true, false};
    e.model = [flips](const Params&) {
        return gp_sample(Dist::beta_star(star_real(10.0), star_real(10.0)), "fairness",
                         [flips](const GroundValue& p) {
                             GenPtr rest = gp_return(p);
                             for (std::size_t i = flips.size(); i-- > 0;)
                                 rest = gp_observe(Dist::flip(p.as_real()),
                                                   GroundValue::boolean(flips[i]), rest);
                             return rest;
                         });
    };
    e.guides["posterior"] = [](const Params&, const StrategyOverrides&) {
        return gp_sample(Dist::beta_star(star_real(16.0), star_real(14.0)), "fairness",
                         [](const GroundValue& p) { return gp_return(p); });
    };
    e.default_guide = "posterior";
    e.init = ParamVector({}, {});
    e.analytic["log_evidence"] = log_beta_fn(16.0, 14.0) - log_beta_fn(10.0, 10.0);
    e.analytic["post_mean"] = 16.0 / 30.0;
    return e;
}

// ---- linreg: Bayesian linear regression on fixed synthetic data ----------

ZooEntry make_linreg() {
    ZooEntry e;
    e.id = "linreg";
    e.blurb = "linear regression with an interaction term and uniform noise scale";
    const std::vector<double> cafrica = {0, 0, 0, 0, 1, 1, 1, 1};
    const std::vector<double> rugged = {0.5, 1.5, 3.0, 4.5, 0.5, 1.5, 3.0, 4.5};
    const std::vector<double> gdp = {8.9, 8.4, 8.2, 7.6, 7.1, 7.0, 7.4, 7.5};
    e.model = [cafrica, rugged, gdp](const Params&) {
        auto n = [](double m, double s) {
            return Dist::normal(star_real(m), star_real(s), StrategyTag::Reinforce);
        };
        return gp_sample(n(0, 10), "a", [=](const GroundValue& a) {
            return gp_sample(n(0, 1), "bA", [=](const GroundValue& ba) {
                return gp_sample(n(0, 1), "bR", [=](const GroundValue& br) {
                    return gp_sample(n(0, 1), "bAR", [=](const GroundValue& bar) {
                        return gp_sample(
                            Dist::uniform_star(star_real(0.0), star_real(10.0)), "sigma",
                            [=](const GroundValue& s) {
                                GenPtr rest = gp_return(GroundValue::unit());
                                for (std::size_t i = gdp.size(); i-- > 0;) {
                                    RealValue mu = rv_add(
                                        a.as_real(),
                                        rv_add(rv_mul(ba.as_real(), star_real(cafrica[i])),
                                               rv_add(rv_mul(br.as_real(), star_real(rugged[i])),
                                                      rv_mul(bar.as_real(),
                                                             star_real(cafrica[i] * rugged[i])))));
                                    rest = gp_observe(Dist::normal(mu, s.as_real()),
                                                      GroundValue::real(gdp[i]), rest);
                                }
                                return rest;
                            });
                    });
                });
            });
        });
    };
    e.guides["naive"] = [](const Params& ps, const StrategyOverrides& ov) {
        auto coeff = [&ps, &ov](const std::string& loc, const std::string& ls, double loc0,
                                const std::string& addr) {
            return std::make_pair(
                Dist::normal(param_or(ps, loc, loc0), rv_exp(param_or(ps, ls, std::log(0.5))),
                             pick(ov, addr, StrategyTag::Reparam)),
                addr);
        };
        auto [da, na] = coeff("g_a", "g_a_ls", 8.0, "a");
        auto [dba, nba] = coeff("g_ba", "g_ba_ls", 0.0, "bA");
        auto [dbr, nbr] = coeff("g_br", "g_br_ls", 0.0, "bR");
        auto [dbar, nbar] = coeff("g_bar", "g_bar_ls", 0.0, "bAR");
        const Dist dsig = Dist::normal(param_or(ps, "g_s", 1.0), star_real(0.05),
                                       pick(ov, "sigma", StrategyTag::Reinforce));
        return gp_sample(da, na, [=](const GroundValue&) {
            return gp_sample(dba, nba, [=](const GroundValue&) {
                return gp_sample(dbr, nbr, [=](const GroundValue&) {
                    return gp_sample(dbar, nbar, [=](const GroundValue&) {
                        return gp_sample(dsig, "sigma", [](const GroundValue&) {
                            return gp_return(GroundValue::unit());
                        });
                    });
                });
            });
        });
    };
    e.default_guide = "naive";
    e.init = ParamVector(
        {"g_a", "g_a_ls", "g_ba", "g_ba_ls", "g_br", "g_br_ls", "g_bar", "g_bar_ls", "g_s"},
        {8.0, std::log(0.5), 0.0, std::log(0.5), 0.0, std::log(0.5), 0.0, std::log(0.5), 1.0});
    return e;
}

std::map<std::string, ZooEntry> make_zoo() {
    std::map<std::string, ZooEntry> zoo;
    for (auto&& e : {make_twoflip(), make_twoflip_obs(), make_twoflip_post(), make_conj(),
                     make_cone(), make_coin(), make_linreg()})
        zoo.emplace(e.id, e);
    return zoo;
}

const std::map<std::string, ZooEntry>& zoo() {
    static const std::map<std::string, ZooEntry> z = make_zoo();
    return z;
}

}  // namespace

ProgramFn ZooEntry::guide(const std::string& guide_id, StrategyOverrides overrides) const {
    const std::string id2 = guide_id.empty() ? default_guide : guide_id;
    auto it = guides.find(id2);
    if (it == guides.end())
        throw ConfigError("model '" + id + "' has no guide '" + id2 + "'");
    GuideFn g = it->second;
    return [g, overrides](const Params& ps) { return g(ps, overrides); };
}

const ZooEntry& zoo_get(const std::string& id) {
    auto it = zoo().find(id);
    if (it == zoo().end()) throw ConfigError("unknown model '" + id + "'");
    return it->second;
}

std::vector<std::string> zoo_ids() {
    std::vector<std::string> ids;
    for (const auto& [k, _] : zoo()) ids.push_back(k);
    return ids;
}

double zoo_analytic(const ZooEntry& e, const std::string& key) {
    auto it = e.analytic.find(key);
    if (it == e.analytic.end())
        throw ConfigError("model '" + e.id + "' has no analytic value '" + key + "'");
    return it->second;
}

}  // namespace provi
