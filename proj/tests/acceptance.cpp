// End-to-end acceptance gate. Each case covers one numbered criterion and
// prints one PASS/FAIL line; thresholds and sample counts are fixed here.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <sstream>

#include "provi/driver.hpp"
#include "provi/marginal.hpp"
#include "provi/optim.hpp"
#include "testutil.hpp"

using namespace provi;

namespace {

struct Criterion {
    int id;
    const char* name;
    bool ok = true;
    void expect(bool c) {
        ok = ok && c;
        CHECK(c);
    }
    ~Criterion() {
        const bool passed = ok && std::uncaught_exceptions() == 0;
        std::printf("ACCEPTANCE %02d %-42s %s\n", id, name, passed ? "PASS" : "FAIL");
        std::fflush(stdout);
    }
};

const double kLogZConj = -0.25 - 0.5 * std::log(4.0 * 3.141592653589793);

GenPtr joint_two_flip() {
    return gp_sample(
        Dist::flip(star_real(0.6), StrategyTag::Reinforce), "c1", [](const GroundValue& c1) {
            const double p2 = c1.as_bool() ? 0.7 : 0.2;
            return gp_sample(Dist::flip(star_real(p2), StrategyTag::Reinforce), "c2",
                             [c1](const GroundValue& c2) {
                                 return gp_return(GroundValue::tuple({c1, c2}));
                             });
        });
}

GenPtr aux_proposal() {
    return gp_sample(Dist::flip(star_real(0.5), StrategyTag::Reinforce), "c2",
                     [](const GroundValue& c2) { return gp_return(c2); });
}

testutil::Moments loss_values(const LossFn& loss, const ParamVector& pv, int samples,
                              std::uint64_t seed) {
    testutil::Moments mo;
    RngStream root(seed);
    for (int i = 0; i < samples; ++i) {
        RngStream rng = root.child(i);
        mo.add(adev_grad(loss, pv, rng).val);
    }
    return mo;
}

testutil::Moments loss_tangents(const LossFn& loss, const ParamVector& pv, int samples,
                                std::uint64_t seed) {
    testutil::Moments mo;
    RngStream root(seed);
    for (int i = 0; i < samples; ++i) {
        RngStream rng = root.child(i);
        mo.add(adev_grad(loss, pv, rng).tan);
    }
    return mo;
}

/// Estimator mean tangent vs central finite differences of the
/// common-random-number Monte-Carlo objective along direction v.
bool adev_matches_fd(const char* label, const LossFn& loss, const ParamVector& pv0,
                     const std::vector<double>& v, int grad_samples, int fd_samples, double h,
                     std::uint64_t seed) {
    const ParamVector pv_dir = pv0.with_direction(v);
    const testutil::Moments grad = loss_tangents(loss, pv_dir, grad_samples, seed);

    auto shifted = [&](double sgn) {
        ParamVector p = pv0;
        for (std::size_t i = 0; i < p.size(); ++i) p.theta[i] += sgn * h * v[i];
        return p;
    };
    const ParamVector pp = shifted(1.0), pm = shifted(-1.0);
    testutil::Moments fd;
    RngStream root(seed + 1);
    for (int i = 0; i < fd_samples; ++i) {
        RngStream r1 = root.child(i);
        RngStream r2 = root.child(i);
        fd.add((adev_grad(loss, pp, r1).val - adev_grad(loss, pm, r2).val) / (2.0 * h));
    }
    const double se =
        std::sqrt(grad.std_err() * grad.std_err() + fd.std_err() * fd.std_err());
    const double diff = std::fabs(grad.mean() - fd.mean());
    // The h^2 truncation bias of the central difference dominates once both
    // estimators are (near-)deterministic, e.g. for fully enumerated
    // objectives; allow it alongside the sampling-error band.
    const double truncation = 1e-4 * h / 1e-3 * (1.0 + std::fabs(fd.mean()));
    const bool ok = diff <= 4.0 * se + truncation;
    if (!ok)
        std::printf("  [fd mismatch] %s: grad %.6f+-%.6f fd %.6f+-%.6f\n", label, grad.mean(),
                    grad.std_err(), fd.mean(), fd.std_err());
    return ok;
}

std::map<std::string, double> sir2_oracle(const GenPtr& target, const GenPtr& proposal) {
    const Enumeration tgt = enumerate_discrete(target);
    const Enumeration prop = enumerate_discrete(proposal);
    std::map<std::string, double> out;
    for (const auto& z1 : prop.entries)
        for (const auto& z2 : prop.entries) {
            const double w1 = tgt.find(z1.trace)->density / z1.density;
            const double w2 = tgt.find(z2.trace)->density / z2.density;
            if (w1 + w2 <= 0.0) continue;
            out[trace_to_json(z1.trace)] += z1.density * z2.density * w1 / (w1 + w2);
            out[trace_to_json(z2.trace)] += z1.density * z2.density * w2 / (w1 + w2);
        }
    return out;
}

std::string strip_last_column(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        const auto pos = line.rfind(',');
        out << (pos == std::string::npos ? line : line.substr(0, pos)) << "\n";
    }
    return out.str();
}

}  // namespace

TEST_CASE("criterion 1") {
    Criterion c{1, "density/sim coherence, 1000 seeds per model"};
    for (const auto& id : zoo_ids()) {
        const ZooEntry& e = zoo_get(id);
        const GenPtr p = e.model(Params::frozen(e.init));
        RngStream root(1001);
        bool all = true;
        for (int i = 0; i < 1000; ++i) {
            RngStream rng = root.child(i);
            const SimResult s = simulate(p, rng);
            const LogWeight d = log_density(p, s.trace);
            all = all && !d.is_zero() && std::fabs(s.log_weight.log.val - d.log.val) <= 1e-9;
        }
        c.expect(all);
    }
}

TEST_CASE("criterion 2") {
    Criterion c{2, "enumeration oracle and evidence sums"};
    struct Case {
        const char* id;
        double evidence;
    };
    for (const Case cs : {Case{"twoflip", 1.0}, Case{"twoflip_obs", 0.3 * 0.9 + 0.7 * 0.1},
                          Case{"twoflip_post",
                               0.6 * (0.7 * 0.8 + 0.3 * 0.3) + 0.4 * (0.2 * 0.8 + 0.8 * 0.3)}}) {
        const ZooEntry& e = zoo_get(cs.id);
        const GenPtr p = e.model(Params::frozen(e.init));
        const Enumeration en = enumerate_discrete(p);
        for (const auto& entry : en.entries)
            c.expect(std::fabs(density(p, entry.trace).val - entry.density) <= 1e-12);
        c.expect(std::fabs(en.total_mass() - cs.evidence) <= 1e-12);
    }
}

TEST_CASE("criterion 3") {
    Criterion c{3, "strategy unbiasedness vs oracle derivatives"};
    const int n = 100000;
    auto live = [](double v) { return smooth_real(make_dual(v, 1.0), "theta"); };
    auto tangents = [&](const Dist& d, const std::function<Dual(const GroundValue&)>& f,
                        std::uint64_t seed) {
        testutil::Moments mo;
        RngStream root(seed);
        for (int i = 0; i < n; ++i) {
            RngStream rng = root.child(i);
            mo.add(dist_estimate(
                       d, "x", [&](const GroundValue& x, RngStream&) { return f(x); }, rng)
                       .tan);
        }
        return mo;
    };
    const auto id_real = [](const GroundValue& x) { return x.as_real().d; };
    const auto sq_real = [](const GroundValue& x) {
        const Dual v = x.as_real().d;
        return v * v;
    };
    const auto sin_real = [](const GroundValue& x) { return dsin(x.as_real().d); };
    const auto indicator = [](const GroundValue& b) {
        return make_dual(b.as_bool() ? 1.0 : 0.0);
    };
    const auto n_id = [](const GroundValue& v) {
        return make_dual(static_cast<double>(v.as_int()));
    };
    const auto n_sq = [](const GroundValue& v) {
        const double x = static_cast<double>(v.as_int());
        return make_dual(x * x);
    };

    // normal reparam: d/dtheta E[x^2] = 2 theta; d/dmu E[sin] by quadrature
    c.expect(testutil::within_4se(
        tangents(Dist::normal(live(1.5), star_real(1.0), StrategyTag::Reparam), sq_real, 31),
        3.0));
    c.expect(testutil::within_4se(
        tangents(Dist::normal(live(0.4), star_real(1.0), StrategyTag::Reparam), sin_real, 32),
        testutil::normal_expectation(0.4, 1.0, [](double x) { return std::cos(x); })));
    // normal reinforce: d/dmu E[x] = 1, d/dmu E[x^2] at 0 is 0
    c.expect(testutil::within_4se(
        tangents(Dist::normal(live(0.0), star_real(1.0), StrategyTag::Reinforce), id_real, 33),
        1.0));
    c.expect(testutil::within_4se(
        tangents(Dist::normal(live(0.0), star_real(1.0), StrategyTag::Reinforce), sq_real, 34),
        0.0));
    // flip: enum exact, reinforce and weak-derivative unbiased
    c.expect(testutil::within_4se(tangents(Dist::flip(live(0.3), StrategyTag::Enum), indicator,
                                           35),
                                  1.0));
    c.expect(testutil::within_4se(
        tangents(Dist::flip(live(0.3), StrategyTag::Reinforce), indicator, 36), 1.0));
    c.expect(testutil::within_4se(tangents(Dist::flip(live(0.3), StrategyTag::Mvd), indicator,
                                           37),
                                  1.0));
    // categorical enum: exact derivative sum
    {
        std::vector<RealValue> probs = {smooth_real(make_dual(0.2, 1.0), "p0"),
                                        smooth_real(make_dual(0.3, 0.0), "p1"),
                                        smooth_real(make_dual(0.5, -1.0), "p2")};
        const testutil::Moments mo =
            tangents(Dist::categorical(probs, StrategyTag::Enum), n_sq, 38);
        c.expect(std::fabs(mo.mean() - (-4.0)) <= 1e-12);
    }
    // poisson: d/dl E[n] = 1, d/dl E[n^2] = 2l + 1 = 5
    c.expect(testutil::within_4se(
        tangents(Dist::poisson(smooth_real(make_dual(2.0, 1.0), "r")), n_id, 39), 1.0));
    c.expect(testutil::within_4se(
        tangents(Dist::poisson(smooth_real(make_dual(2.0, 1.0), "r")), n_sq, 40), 5.0));
}

TEST_CASE("criterion 4") {
    Criterion c{4, "enumeration strategies have zero tangent variance"};
    const auto payoff_b = [](const GroundValue& b, RngStream&) {
        return make_dual(b.as_bool() ? 2.0 : -1.0);
    };
    const auto payoff_i = [](const GroundValue& i, RngStream&) {
        return make_dual(static_cast<double>(i.as_int() * 2 - 1));
    };
    testutil::Moments flip_mo, cat_mo;
    const Dist df = Dist::flip(smooth_real(make_dual(0.3, 1.0), "p"), StrategyTag::Enum);
    const Dist dc = Dist::categorical({smooth_real(make_dual(0.2, 1.0), "p0"),
                                       smooth_real(make_dual(0.3, 0.5), "p1"),
                                       smooth_real(make_dual(0.5, -1.5), "p2")},
                                      StrategyTag::Enum);
    RngStream root(4001);
    for (int i = 0; i < 1000; ++i) {
        RngStream r1 = root.child(i);
        RngStream r2 = root.child(i);
        flip_mo.add(dist_estimate(df, "x", payoff_b, r1).tan);
        cat_mo.add(dist_estimate(dc, "x", payoff_i, r2).tan);
    }
    c.expect(flip_mo.variance() == 0.0);
    c.expect(cat_mo.variance() == 0.0);
}

TEST_CASE("criterion 5") {
    Criterion c{5, "estimator gradients match finite differences"};
    const int gs = 100000;       // gradient samples
    const int fs = 1000000;      // objective samples per finite-difference side
    const double h = 1e-3;

    const ZooEntry& conj = zoo_get("conj");
    const ParamVector conj_pt({"m", "s"}, {0.2, 0.9});
    c.expect(adev_matches_fd("conj/elbo", elbo(conj.model, conj.guide("naive")), conj_pt,
                             {1.0, 1.0}, gs, fs, h, 501));
    c.expect(adev_matches_fd("conj/elbo-reinforce",
                             elbo(conj.model, conj.guide("reinforce")), conj_pt, {1.0, 1.0},
                             4 * gs, fs, h, 502));
    c.expect(adev_matches_fd("conj/iwelbo5", iwelbo(conj.model, conj.guide("naive"), 5),
                             conj_pt, {1.0, 1.0}, gs, fs, h, 503));
    c.expect(adev_matches_fd("conj/qwake2",
                             qwake(conj.model, conj.guide("naive"), 2, conj.init), conj_pt,
                             {1.0, 1.0}, gs, fs, h, 504));
    {
        const ParamVector theta({"pm"}, {0.4});
        c.expect(adev_matches_fd("conj/pwake2",
                                 pwake(conj.model, conj.guide("naive"), 2, conj.init), theta,
                                 {1.0}, gs, fs, h, 505));
    }
    const ZooEntry& tf = zoo_get("twoflip_post");
    c.expect(adev_matches_fd("twoflip_post/elbo", elbo(tf.model, tf.guide("naive")), tf.init,
                             {1.0, -1.0, 0.5}, gs / 10, fs / 10, h, 506));
    c.expect(adev_matches_fd(
        "twoflip_post/hvi2",
        hvi_elbo(tf.model, tf.guide("joint"), tf.hvi_kept,
                 [&tf](const Params& ps) { return tf.hvi_alg(ps, 2); }),
        tf.hvi_init, {1.0, -0.5, 0.5, -1.0}, gs, fs / 2, h, 507));
    const ZooEntry& cone = zoo_get("cone");
    {
        ParamVector pt({"qmx", "qmy", "qlsx", "qlsy"},
                       {1.0, 1.0, std::log(0.8), std::log(0.8)});
        c.expect(adev_matches_fd("cone/elbo", elbo(cone.model, cone.guide("naive")), pt,
                                 {1.0, -1.0, 0.5, 0.5}, gs, fs / 2, h, 508));
    }
    const ZooEntry& lin = zoo_get("linreg");
    {
        std::vector<double> v(lin.init.size(), 1.0);
        c.expect(adev_matches_fd("linreg/elbo", elbo(lin.model, lin.guide("naive")), lin.init,
                                 v, gs, fs / 2, h, 509));
    }
}

TEST_CASE("criterion 6") {
    Criterion c{6, "conjugate bound value and Adam training"};
    const ZooEntry& e = zoo_get("conj");
    const LossFn loss = elbo(e.model, e.guide("naive"));
    const ParamVector post({"m", "s"}, {0.5, 1.0 / std::sqrt(2.0)});
    const testutil::Moments mo = loss_values(loss, post, 20000, 601);
    c.expect(testutil::within_4se(mo, kLogZConj) ||
             std::fabs(mo.mean() - kLogZConj) <= 1e-9);

    // 200 Adam steps, lr 0.05, batch 32, from (m, s) = (0, 1). The iterates
    // must reach the tolerance ball around the analytic posterior, and the
    // tail-averaged iterate must sit inside it. (The stationary Adam noise
    // at this fixed step size is itself of order 0.05, so the last raw
    // iterate alone is not a stable readout.)
    const double s_star = 1.0 / std::sqrt(2.0);
    ParamVector pv({"m", "s"}, {0.0, 1.0});
    AdamState adam;
    adam.lr = 0.05;
    RngStream root(602);
    bool reached = false;
    double avg_m = 0.0, avg_s = 0.0;
    int tail = 0;
    for (int step = 0; step < 200; ++step) {
        const GradStats g =
            grad_mean(loss, pv, 32, root.child(step), GradMode::Reverse);
        adam_step(adam, pv.theta, g.mean);
        if (std::fabs(pv.theta[0] - 0.5) < 0.05 && std::fabs(pv.theta[1] - s_star) < 0.05)
            reached = true;
        if (step >= 100) {
            avg_m += pv.theta[0];
            avg_s += pv.theta[1];
            ++tail;
        }
    }
    c.expect(reached);
    c.expect(std::fabs(avg_m / tail - 0.5) < 0.05);
    c.expect(std::fabs(avg_s / tail - s_star) < 0.05);
}

TEST_CASE("criterion 7") {
    Criterion c{7, "importance-weighted bound ordering"};
    const ZooEntry& e = zoo_get("conj");
    const ParamVector wrong({"m", "s"}, {-0.5, 1.4});
    const int n_pairs = 20000;
    std::map<int, std::vector<double>> draws;
    for (int n : {1, 5, 25}) {
        const LossFn loss = iwelbo(e.model, e.guide("naive"), n);
        RngStream root(701);
        for (int i = 0; i < n_pairs; ++i) {
            RngStream rng = root.child(i);
            draws[n].push_back(adev_grad(loss, wrong, rng).val);
        }
    }
    auto gap = [&](int lo, int hi) {
        testutil::Moments d;
        for (int i = 0; i < n_pairs; ++i) d.add(draws[hi][i] - draws[lo][i]);
        return d.mean() / d.std_err();
    };
    c.expect(gap(1, 5) > 3.09);    // one-sided alpha = 0.001
    c.expect(gap(5, 25) > 3.09);
    testutil::Moments m25;
    for (double v : draws[25]) m25.add(v);
    c.expect((kLogZConj - m25.mean()) / m25.std_err() > 3.09);
}

TEST_CASE("criterion 8") {
    Criterion c{8, "marginal and SIR estimator unbiasedness"};
    // marginal density estimates vs the enumerated marginal
    const Enumeration en = enumerate_discrete(joint_two_flip());
    double marg_true = 0.0;
    for (const auto& entry : en.entries)
        if (entry.trace.find("c1")->as_bool()) marg_true += entry.density;
    const Trace kept = Trace::single("c1", GroundValue::boolean(true));
    for (int n : {1, 5, 25}) {
        const Gen::Marginal m{{"c1"}, joint_two_flip(), [n](const Trace&) {
                                  return ImportanceAlg{aux_proposal(), n};
                              }};
        testutil::Moments mo;
        RngStream root(801 + n);
        for (int i = 0; i < 10000; ++i) {
            RngStream rng = root.child(i);
            mo.add(marginal_density_est(m, kept)
                       .run([](const LogWeight& w, RngStream&) { return w.linear(); }, rng)
                       .val);
        }
        c.expect(testutil::within_4se(mo, marg_true));
    }

    // SIR output frequencies vs the exhaustive two-particle oracle
    const ZooEntry& e = zoo_get("twoflip_post");
    const GenPtr target = e.model(Params::frozen(e.init));
    const GenPtr prop = joint_two_flip();
    const Gen::Normalize node{target, ImportanceAlg{prop, 2}};
    const std::map<std::string, double> oracle = sir2_oracle(target, prop);
    std::map<std::string, int> counts;
    const int n_draws = 100000;
    RngStream root(810);
    for (int i = 0; i < n_draws; ++i) {
        RngStream rng = root.child(i);
        counts[trace_to_json(normalize_simulate(node, rng).trace)] += 1;
    }
    std::vector<double> obs, exp;
    for (const auto& [key, p] : oracle) {
        obs.push_back(counts[key]);
        exp.push_back(p * n_draws);
    }
    c.expect(testutil::chi2_statistic(obs, exp) <
             testutil::chi2_quantile(0.999, static_cast<double>(obs.size() - 1)));

    // plain bound on the SIR guide == importance-weighted bound on the base
    const StrategyOverrides sampled = {{"c1", StrategyTag::Reinforce},
                                       {"c2", StrategyTag::Reinforce}};
    const ProgramFn q_naive = e.guide("naive", sampled);
    const ProgramFn q_sir = [&e, q_naive](const Params& ps) {
        return gp_normalize(e.model(ps), ImportanceAlg{q_naive(ps), 4});
    };
    const testutil::Moments a = loss_values(elbo(e.model, q_sir), e.init, 20000, 811);
    const testutil::Moments b = loss_values(iwelbo(e.model, q_naive, 4), e.init, 20000, 812);
    c.expect(std::fabs(a.mean() - b.mean()) <=
             4.0 * std::sqrt(a.std_err() * a.std_err() + b.std_err() * b.std_err()));
}

TEST_CASE("criterion 9") {
    Criterion c{9, "hierarchical bound sits below the exact-marginal bound"};
    const ZooEntry& e = zoo_get("twoflip_post");
    const GenPtr model = e.model(Params::frozen(e.init));
    const GenPtr joint = e.guide("joint")(Params::frozen(e.hvi_init));
    const Enumeration joint_en = enumerate_discrete(joint);
    std::map<std::string, double> qmarg;
    for (const auto& entry : joint_en.entries) {
        Trace z;
        z = z.with("c1", *entry.trace.find("c1"));
        z = z.with("c2", *entry.trace.find("c2"));
        qmarg[trace_to_json(z)] += entry.density;
    }
    double exact_bound = 0.0;
    for (const auto& [key, q] : qmarg) {
        const Trace z = trace_from_json(key);
        exact_bound += q * (std::log(density(model, z).val) - std::log(q));
    }
    const StrategyOverrides sampled = {{"a", StrategyTag::Reinforce},
                                       {"c1", StrategyTag::Reinforce},
                                       {"c2", StrategyTag::Reinforce}};
    auto bound_for = [&](int n, int samples, std::uint64_t seed) {
        const LossFn loss =
            hvi_elbo(e.model, e.guide("joint", sampled), e.hvi_kept,
                     [&e, n](const Params& ps) { return e.hvi_alg(ps, n); });
        return loss_values(loss, e.hvi_init, samples, seed);
    };
    const testutil::Moments b1 = bound_for(1, 40000, 901);
    const testutil::Moments b3 = bound_for(3, 120000, 902);
    c.expect(b1.mean() + 4.0 * b1.std_err() <= exact_bound);
    c.expect(b3.mean() + 4.0 * b3.std_err() <= exact_bound);

    // N = 10 exceeds N = 1 on paired draws, one-sided alpha = 0.001
    const LossFn l1 = hvi_elbo(e.model, e.guide("joint", sampled), e.hvi_kept,
                               [&e](const Params& ps) { return e.hvi_alg(ps, 1); });
    const LossFn l10 = hvi_elbo(e.model, e.guide("joint", sampled), e.hvi_kept,
                                [&e](const Params& ps) { return e.hvi_alg(ps, 10); });
    testutil::Moments gap;
    RngStream root(903);
    for (int i = 0; i < 20000; ++i) {
        RngStream r1 = root.child(i), r2 = root.child(i);
        gap.add(adev_grad(l10, e.hvi_init, r2).val - adev_grad(l1, e.hvi_init, r1).val);
    }
    c.expect(gap.mean() / gap.std_err() > 3.09);
}

TEST_CASE("criterion 10") {
    Criterion c{10, "forward/reverse agreement"};
    // pathwise and enumerated objectives: per-sample equality
    {
        const ZooEntry& e = zoo_get("conj");
        const LossFn loss = elbo(e.model, e.guide("naive"));
        const ParamVector pv({"m", "s"}, {0.2, 0.9});
        RngStream root(1010);
        double max_diff = 0.0;
        for (int i = 0; i < 200; ++i) {
            RngStream r1 = root.child(i);
            const GradSample rev = reverse_value_grad(loss, pv, r1);
            const GradSample fwd = forward_value_grad(loss, pv, root.child(i));
            for (std::size_t k = 0; k < pv.size(); ++k)
                max_diff = std::max(max_diff, std::fabs(rev.grad[k] - fwd.grad[k]));
        }
        c.expect(max_diff <= 1e-9);
    }
    {
        const ZooEntry& e = zoo_get("twoflip_post");
        const LossFn loss = elbo(e.model, e.guide("naive"));
        RngStream root(1011);
        double max_diff = 0.0;
        for (int i = 0; i < 200; ++i) {
            RngStream r1 = root.child(i);
            const GradSample rev = reverse_value_grad(loss, e.init, r1);
            const GradSample fwd = forward_value_grad(loss, e.init, root.child(i));
            for (std::size_t k = 0; k < e.init.size(); ++k)
                max_diff = std::max(max_diff, std::fabs(rev.grad[k] - fwd.grad[k]));
        }
        c.expect(max_diff <= 1e-9);
    }
    // score-function and weak-derivative objectives: mean agreement
    const ZooEntry& e = zoo_get("twoflip_post");
    for (StrategyTag tag : {StrategyTag::Reinforce, StrategyTag::Mvd}) {
        const StrategyOverrides ov = {{"c1", tag}, {"c2", tag}};
        const LossFn loss = elbo(e.model, e.guide("naive", ov));
        for (std::size_t k = 0; k < e.init.size(); ++k) {
            testutil::Moments fwd, rev;
            RngStream root(1012 + static_cast<int>(tag));
            for (int i = 0; i < 100000; ++i) {
                RngStream r1 = root.child(i);
                rev.add(reverse_value_grad(loss, e.init, r1).grad[k]);
                fwd.add(forward_value_grad(loss, e.init, root.child(i)).grad[k]);
            }
            const double se =
                std::sqrt(fwd.std_err() * fwd.std_err() + rev.std_err() * rev.std_err());
            c.expect(std::fabs(fwd.mean() - rev.mean()) <= std::max(4.0 * se, 1e-9));
        }
    }
}

TEST_CASE("criterion 11") {
    Criterion c{11, "smoothness discipline catches the counterexamples"};
    auto comparison_model = [](StrategyTag tag) {
        return gp_sample(
            Dist::normal(star_real(0.0), star_real(1.0), tag), "x", [](const GroundValue& x) {
                const bool below = rv_less(x.as_real(), star_real(1.0));
                return gp_sample(Dist::flip(star_real(below ? 0.9 : 0.1)), "y",
                                 [](const GroundValue& y) { return gp_return(y); });
            });
    };
    {
        RngStream rng(1101);
        bool raised = false;
        try {
            (void)simulate(comparison_model(StrategyTag::Reparam), rng);
        } catch (const SmoothnessViolation& v) {
            raised = true;
            c.expect(v.origin == "x");
        }
        c.expect(raised);
    }
    {
        RngStream rng(1102);
        bool clean = true;
        try {
            for (int i = 0; i < 50; ++i) {
                RngStream r = RngStream(1102).child(i);
                (void)simulate(comparison_model(StrategyTag::Reinforce), r);
            }
        } catch (const SmoothnessViolation&) {
            clean = false;
        }
        c.expect(clean);
    }
    {
        bool raised = false;
        try {
            (void)Dist::uniform_star(smooth_real(make_dual(0.0, 1.0), "theta"),
                                     star_real(1.0));
        } catch (const SmoothnessViolation&) {
            raised = true;
        }
        c.expect(raised);
        // star-tagged bounds (e.g. from a reinforce draw) are accepted
        RngStream rng(1103);
        const GroundValue lo = dist_simulate(
            Dist::normal(star_real(0.0), star_real(1.0), StrategyTag::Reinforce), rng);
        bool clean = true;
        try {
            (void)Dist::uniform_star(lo.as_real(), star_real(50.0));
        } catch (const SmoothnessViolation&) {
            clean = false;
        }
        c.expect(clean);
    }
}

TEST_CASE("criterion 12") {
    Criterion c{12, "poisson-product exponential estimator identity"};
    struct Case {
        double v, t;
    };
    int seed = 1201;
    for (const Case cs : {Case{0.0, 0.0}, Case{0.5, 1.0}, Case{-1.0, 2.0}}) {
        const LossEst est = loss_exp(exact_loss(make_dual(cs.v, cs.t)), 1.0);
        testutil::Moments value, tangent;
        RngStream root(seed++);
        for (int i = 0; i < 100000; ++i) {
            RngStream rng = root.child(i);
            const Dual d = est.sample(rng);
            value.add(d.val);
            tangent.add(d.tan);
        }
        c.expect(testutil::within_4se(value, std::exp(cs.v)));
        const double target_tan = std::exp(cs.v) * cs.t;
        c.expect(tangent.z_against(target_tan) <= 4.0 ||
                 std::fabs(tangent.mean() - target_tan) <= 1e-12);
    }
}

TEST_CASE("criterion 13") {
    Criterion c{13, "byte-level reproducibility of runs"};
    ExperimentConfig cfg;
    cfg.model = "conj";
    cfg.objective.kind = "elbo";
    cfg.steps = 6;
    cfg.batch = 16;
    cfg.seed = 20240;
    cfg.lr = 0.05;
    auto train_text = [&](int workers) {
        ExperimentConfig run = cfg;
        run.workers = workers;
        std::ostringstream csv, summary;
        run_train(run, csv, summary);
        return strip_last_column(csv.str()) + summary.str();
    };
    const std::string a = train_text(1);
    c.expect(a == train_text(1));
    c.expect(a == train_text(4));

    GradcheckOptions opt;
    opt.samples = 2000;
    auto grad_text = [&] {
        std::ostringstream out;
        ExperimentConfig g = cfg;
        g.mode = GradMode::Forward;
        run_gradcheck(g, opt, out);
        return out.str();
    };
    c.expect(grad_text() == grad_text());
}
