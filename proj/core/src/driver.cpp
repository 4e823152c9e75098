#include "provi/driver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "provi/compile.hpp"
#include "provi/optim.hpp"

namespace provi {

namespace {

using json = nlohmann::ordered_json;

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += "\"";
    return out;
}

GradMode parse_mode(const std::string& m) {
    if (m == "forward") return GradMode::Forward;
    if (m == "reverse") return GradMode::Reverse;
    throw ConfigError("at /mode: expected \"forward\" or \"reverse\", got \"" + m + "\"");
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    auto fail = [](const std::string& path, const std::string& what) {
        throw ConfigError("at " + path + ": " + what);
    };
    try {
        for (const auto& [key, val] : j.items()) {
            const std::string path = "/" + key;
            if (key == "model")
                cfg.model = val.get<std::string>();
            else if (key == "guide")
                cfg.guide = val.get<std::string>();
            else if (key == "objective") {
                if (val.is_string()) {
                    cfg.objective.kind = val.get<std::string>();
                } else if (val.is_object()) {
                    for (const auto& [ok, ov] : val.items()) {
                        if (ok == "kind")
                            cfg.objective.kind = ov.get<std::string>();
                        else if (ok == "n")
                            cfg.objective.n = ov.get<int>();
                        else
                            fail(path + "/" + ok, "unknown key");
                    }
                } else {
                    fail(path, "expected string or object");
                }
            } else if (key == "n")
                cfg.objective.n = val.get<int>();
            else if (key == "strategies") {
                if (!val.is_object()) fail(path, "expected object of address -> tag");
                for (const auto& [addr, tag] : val.items())
                    cfg.strategy_overrides[addr] = parse_strategy(tag.get<std::string>());
            } else if (key == "optimizer")
                cfg.optimizer = val.get<std::string>();
            else if (key == "lr")
                cfg.lr = val.get<double>();
            else if (key == "steps")
                cfg.steps = val.get<int>();
            else if (key == "batch")
                cfg.batch = val.get<int>();
            else if (key == "seed")
                cfg.seed = val.get<std::uint64_t>();
            else if (key == "mode")
                cfg.mode = parse_mode(val.get<std::string>());
            else if (key == "workers")
                cfg.workers = val.get<int>();
            else if (key == "out")
                cfg.out = val.get<std::string>();
            else
                fail(path, "unknown key");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config type error: ") + e.what());
    }
    if (cfg.steps < 0 || cfg.batch < 1 || cfg.objective.n < 1 || cfg.workers < 1)
        throw ConfigError("steps/batch/n/workers out of range");
    return cfg;
}

void apply_seed_env(ExperimentConfig& cfg) {
    if (const char* s = std::getenv("VI_SEED")) cfg.seed = std::strtoull(s, nullptr, 10);
}

LossFn build_objective(const ExperimentConfig& cfg) {
    const ZooEntry& e = zoo_get(cfg.model);
    const std::string kind = cfg.objective.kind;
    const int n = cfg.objective.n;
    if (kind == "elbo") return elbo(e.model, e.guide(cfg.guide, cfg.strategy_overrides));
    if (kind == "iwelbo") return iwelbo(e.model, e.guide(cfg.guide, cfg.strategy_overrides), n);
    if (kind == "qwake")
        return qwake(e.model, e.guide(cfg.guide, cfg.strategy_overrides), n, e.init);
    if (kind == "pwake")
        return pwake(e.model, e.guide(cfg.guide, cfg.strategy_overrides), n, e.init);
    if (kind == "hvi") {
        if (e.hvi_guide.empty())
            throw ConfigError("model '" + e.id + "' has no hierarchical guide");
        auto alg = e.hvi_alg;
        return hvi_elbo(e.model, e.guide(e.hvi_guide, cfg.strategy_overrides), e.hvi_kept,
                        [alg, n](const Params& ps) { return alg(ps, n); });
    }
    throw ConfigError("at /objective/kind: unknown objective '" + kind + "'");
}

ParamVector initial_params(const ExperimentConfig& cfg) {
    const ZooEntry& e = zoo_get(cfg.model);
    if (cfg.objective.kind == "hvi" && !e.hvi_init.names.empty()) return e.hvi_init;
    return e.init;
}

void run_train(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& summary) {
    const LossFn loss = build_objective(cfg);
    ParamVector pv = initial_params(cfg);
    RngStream root(cfg.seed);

    csv << "step,objective";
    for (const auto& n : pv.names) csv << "," << n;
    csv << ",wall_ms\n";

    SgdState sgd{cfg.lr};
    AdamState adam;
    adam.lr = cfg.lr;
    const bool use_adam = cfg.optimizer == "adam";
    if (!use_adam && cfg.optimizer != "sgd")
        throw ConfigError("at /optimizer: expected \"adam\" or \"sgd\"");

    double last_objective = 0.0;
    for (int step = 0; step < cfg.steps; ++step) {
        const auto t0 = std::chrono::steady_clock::now();
        const GradStats g = grad_mean(loss, pv, cfg.batch,
                                      root.child(static_cast<std::uint64_t>(step)), cfg.mode,
                                      cfg.workers);
        if (use_adam)
            adam_step(adam, pv.theta, g.mean);
        else
            sgd_step(sgd, pv.theta, g.mean);
        last_objective = g.value_mean;
        const auto t1 = std::chrono::steady_clock::now();
        const double wall_ms =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0)
                .count();
        csv << step << "," << fmt_double(g.value_mean);
        for (double t : pv.theta) csv << "," << fmt_double(t);
        csv << "," << fmt_double(wall_ms) << "\n";
    }

    json out;
    out["model"] = cfg.model;
    out["objective"] = cfg.objective.kind;
    out["steps"] = cfg.steps;
    out["seed"] = cfg.seed;
    out["final_objective"] = last_objective;
    json params = json::object();
    for (std::size_t i = 0; i < pv.size(); ++i) params[pv.names[i]] = pv.theta[i];
    out["params"] = std::move(params);
    summary << out.dump(2) << "\n";
}

void run_gradcheck(const ExperimentConfig& cfg, const GradcheckOptions& opt,
                   std::ostream& json_out) {
    const LossFn loss = build_objective(cfg);
    ParamVector pv = initial_params(cfg);
    if (!opt.theta.empty()) {
        if (opt.theta.size() != pv.size())
            throw ConfigError("--theta needs " + std::to_string(pv.size()) + " values");
        pv.theta = opt.theta;
    }
    std::vector<double> v(pv.size(), 1.0);
    if (!opt.v.empty()) {
        if (opt.v.size() != pv.size())
            throw ConfigError("--v needs " + std::to_string(pv.size()) + " values");
        v = opt.v;
    }
    RngStream root(cfg.seed);
    const ParamVector pv_dir = pv.with_direction(v);

    double tan_sum = 0.0, tan_sq = 0.0;
    for (int j = 0; j < opt.samples; ++j) {
        RngStream rj = root.child(static_cast<std::uint64_t>(j));
        double t;
        if (cfg.mode == GradMode::Forward) {
            t = adev_grad(loss, pv_dir, rj).tan;
        } else {
            const std::vector<double> g = reverse_grad(loss, pv, rj);
            t = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) t += g[i] * v[i];
        }
        tan_sum += t;
        tan_sq += t * t;
    }
    const double N = opt.samples;
    const double mean = tan_sum / N;
    const double se =
        N > 1 ? std::sqrt(std::max(0.0, (tan_sq - N * mean * mean) / (N * (N - 1)))) : 0.0;

    // Central finite difference of the Monte-Carlo objective under common
    // random numbers: sample j uses the same stream at theta +/- h v.
    const double h = opt.fd_step;
    auto shifted = [&](double sgn) {
        ParamVector p = pv;
        for (std::size_t i = 0; i < p.size(); ++i) p.theta[i] += sgn * h * v[i];
        return p;
    };
    const ParamVector pp = shifted(+1.0), pm = shifted(-1.0);
    double fd_sum = 0.0, fd_sq = 0.0;
    for (int j = 0; j < opt.samples; ++j) {
        RngStream r1 = root.child(static_cast<std::uint64_t>(j));
        RngStream r2 = root.child(static_cast<std::uint64_t>(j));
        const double lp = adev_grad(loss, pp, r1).val;
        const double lm = adev_grad(loss, pm, r2).val;
        const double d = (lp - lm) / (2.0 * h);
        fd_sum += d;
        fd_sq += d * d;
    }
    const double fd_mean = fd_sum / N;
    const double fd_se =
        N > 1 ? std::sqrt(std::max(0.0, (fd_sq - N * fd_mean * fd_mean) / (N * (N - 1)))) : 0.0;

    const double denom = std::sqrt(se * se + fd_se * fd_se);
    json out;
    out["mean"] = mean;
    out["std_err"] = se;
    out["finite_diff"] = fd_mean;
    out["fd_std_err"] = fd_se;
    out["z_score"] = denom > 0.0 ? (mean - fd_mean) / denom : 0.0;
    out["samples"] = opt.samples;
    json_out << out.dump(2) << "\n";
}

void run_enumerate(const std::string& model_id, std::ostream& csv) {
    const ZooEntry& e = zoo_get(model_id);
    const GenPtr prog = e.model(Params::frozen(e.init));
    const Enumeration en = enumerate_discrete(prog);
    csv << "trace,density,log_density,tangent\n";
    for (const auto& entry : en.entries) {
        const Dual d = density(prog, entry.trace);
        csv << csv_quote(trace_to_json(entry.trace)) << "," << fmt_double(d.val) << ","
            << fmt_double(std::log(d.val)) << "," << fmt_double(d.tan) << "\n";
    }
}

void run_density(const std::string& model_id, const std::string& trace_json, std::ostream& csv) {
    const ZooEntry& e = zoo_get(model_id);
    const GenPtr prog = e.model(Params::frozen(e.init));
    Trace u;
    try {
        u = trace_from_json(trace_json);
    } catch (const TypeError& err) {
        throw ConfigError(err.what());
    }
    const Dual d = density(prog, u);
    csv << "trace,density,log_density,tangent\n";
    csv << csv_quote(trace_to_json(u)) << "," << fmt_double(d.val) << ","
        << fmt_double(d.val > 0.0 ? std::log(d.val) : -std::numeric_limits<double>::infinity())
        << "," << fmt_double(d.tan) << "\n";
}

namespace {

LossEst strategy_loss(Dist d, std::function<Dual(const GroundValue&)> f) {
    Prob<Dual> m{[d = std::move(d), f = std::move(f)](const Prob<Dual>::Cont& k, RngStream& rng) {
        return dist_estimate(d, "x", [&](const GroundValue& x, RngStream& r) { return k(f(x), r); },
                             rng);
    }};
    return expect(std::move(m));
}

}  // namespace

void run_bench(std::uint64_t seed, int samples, std::ostream& csv) {
    const RealValue theta = smooth_real(make_dual(1.0, 1.0), "theta");
    const RealValue p = smooth_real(make_dual(0.3, 1.0), "p");
    const RealValue unit_sigma = star_real(1.0);
    auto fsq = [](const GroundValue& x) {
        const Dual v = x.as_real().d;
        return v * v;
    };
    auto fbool = [](const GroundValue& b) { return make_dual(b.as_bool() ? 2.0 : -1.0); };
    auto fint = [](const GroundValue& i) {
        const double v = static_cast<double>(i.as_int());
        return make_dual(v * v);
    };
    auto freal = [](const GroundValue& x) { return x.as_real().d; };

    std::vector<std::pair<std::string, LossEst>> cases;
    cases.emplace_back("normal_reparam",
                       strategy_loss(Dist::normal(theta, unit_sigma, StrategyTag::Reparam), fsq));
    cases.emplace_back(
        "normal_reinforce",
        strategy_loss(Dist::normal(theta, unit_sigma, StrategyTag::Reinforce), fsq));
    cases.emplace_back("flip_enum", strategy_loss(Dist::flip(p, StrategyTag::Enum), fbool));
    cases.emplace_back("flip_reinforce",
                       strategy_loss(Dist::flip(p, StrategyTag::Reinforce), fbool));
    cases.emplace_back("flip_mvd", strategy_loss(Dist::flip(p, StrategyTag::Mvd), fbool));
    {
        std::vector<RealValue> probs = {smooth_real(make_dual(0.2, 1.0), "p0"),
                                        smooth_real(make_dual(0.3, 0.0), "p1"),
                                        smooth_real(make_dual(0.5, -1.0), "p2")};
        cases.emplace_back("categorical_enum",
                           strategy_loss(Dist::categorical(probs, StrategyTag::Enum), fint));
        cases.emplace_back("categorical_reinforce",
                           strategy_loss(Dist::categorical(probs, StrategyTag::Reinforce), fint));
    }
    cases.emplace_back("poisson_reinforce",
                       strategy_loss(Dist::poisson(smooth_real(make_dual(2.0, 1.0), "rate")),
                                     [](const GroundValue& n) {
                                         return make_dual(static_cast<double>(n.as_int()));
                                     }));
    cases.emplace_back(
        "uniform_none",
        strategy_loss(Dist::uniform_star(star_real(0.0), star_real(1.0)), freal));

    csv << "strategy,mean,variance,ns_per_sample\n";
    for (auto& [name, est] : cases) {
        RngStream root(seed);
        double sum = 0.0, sq = 0.0;
        const auto t0 = std::chrono::steady_clock::now();
        for (int j = 0; j < samples; ++j) {
            RngStream rj = root.child(static_cast<std::uint64_t>(j));
            const double t = est.sample(rj).tan;
            sum += t;
            sq += t * t;
        }
        const auto t1 = std::chrono::steady_clock::now();
        const double N = samples;
        const double mean = sum / N;
        const double var = N > 1 ? std::max(0.0, (sq - N * mean * mean) / (N - 1)) : 0.0;
        const double ns =
            std::chrono::duration_cast<std::chrono::duration<double, std::nano>>(t1 - t0)
                .count() /
            N;
        csv << name << "," << fmt_double(mean) << "," << fmt_double(var) << ","
            << fmt_double(ns) << "\n";
    }
}

}  // namespace provi
