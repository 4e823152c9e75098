#include <doctest.h>

#include <cmath>
#include <map>

#include "provi/marginal.hpp"
#include "provi/zoo.hpp"
#include "testutil.hpp"

using namespace provi;

namespace {

// c1 ~ flip(0.6); c2 | c1 ~ flip(0.7 / 0.2). Sampled (not enumerated)
// versions so draw-based tests are well defined.
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

GenPtr aux_proposal_uniform() {
    return gp_sample(Dist::flip(star_real(0.5), StrategyTag::Reinforce), "c2",
                     [](const GroundValue& c2) { return gp_return(c2); });
}

Gen::Marginal marginal_node(int n, bool exact_conditional = false) {
    AlgFn alg;
    if (exact_conditional) {
        alg = [n](const Trace& kept) {
            const bool c1 = kept.find("c1")->as_bool();
            GenPtr prop = gp_sample(
                Dist::flip(star_real(c1 ? 0.7 : 0.2), StrategyTag::Reinforce), "c2",
                [](const GroundValue& c2) { return gp_return(c2); });
            return ImportanceAlg{std::move(prop), n};
        };
    } else {
        alg = [n](const Trace&) { return ImportanceAlg{aux_proposal_uniform(), n}; };
    }
    return Gen::Marginal{{"c1"}, joint_two_flip(), std::move(alg)};
}

double density_draw(Prob<LogWeight> est, RngStream rng) {
    return est.run([](const LogWeight& w, RngStream&) { return w.linear(); }, rng).val;
}

// Exhaustive two-particle SIR output law: for every proposal pair (z1, z2),
// the selected trace is z_i with probability w_i / (w1 + w2).
std::map<std::string, double> sir2_oracle(const GenPtr& target, const GenPtr& proposal) {
    const Enumeration tgt = enumerate_discrete(target);
    const Enumeration prop = enumerate_discrete(proposal);
    std::map<std::string, double> out;
    for (const auto& z1 : prop.entries)
        for (const auto& z2 : prop.entries) {
            const double w1 = tgt.find(z1.trace)->density / z1.density;
            const double w2 = tgt.find(z2.trace)->density / z2.density;
            const double pair_p = z1.density * z2.density;
            if (w1 + w2 <= 0.0) continue;
            out[trace_to_json(z1.trace)] += pair_p * w1 / (w1 + w2);
            out[trace_to_json(z2.trace)] += pair_p * w2 / (w1 + w2);
        }
    return out;
}

}  // namespace

TEST_CASE("marginal density estimates are unbiased for the enumerated marginal") {
    const Enumeration en = enumerate_discrete(joint_two_flip());
    double marg_true = 0.0;
    for (const auto& e : en.entries)
        if (e.trace.find("c1")->as_bool()) marg_true += e.density;
    CHECK(marg_true == doctest::Approx(0.6).epsilon(1e-12));

    const Trace kept = Trace::single("c1", GroundValue::boolean(true));
    for (int n : {1, 5, 25}) {
        const Gen::Marginal m = marginal_node(n);
        testutil::Moments mo;
        RngStream root(300 + n);
        for (int i = 0; i < 10000; ++i)
            mo.add(density_draw(marginal_density_est(m, kept), root.child(i)));
        CHECK(testutil::within_4se(mo, marg_true));
    }
}

TEST_CASE("exact auxiliary conditional proposal gives a zero-variance estimate") {
    const Gen::Marginal m = marginal_node(1, /*exact_conditional=*/true);
    const Trace kept = Trace::single("c1", GroundValue::boolean(true));
    RngStream root(17);
    for (int i = 0; i < 50; ++i) {
        const double est = density_draw(marginal_density_est(m, kept), root.child(i));
        CHECK(est == doctest::Approx(0.6).epsilon(1e-12));
    }
}

TEST_CASE("single-particle estimate is the joint/proposal ratio of its draw") {
    const Gen::Marginal m = marginal_node(1);
    const Trace kept = Trace::single("c1", GroundValue::boolean(true));
    RngStream rng(99);
    const double est = density_draw(marginal_density_est(m, kept), rng);
    // replay the estimator's stream layout: particles live under child(0),
    // particle 0 under child(0).child(0)
    RngStream replay = RngStream(99).child(0).child(0);
    const SimResult aux = simulate(aux_proposal_uniform(), replay);
    const double joint =
        density(joint_two_flip(), trace_concat(kept, aux.trace)).val;
    const double q = aux.log_weight.linear().val;
    CHECK(est == doctest::Approx(joint / q).epsilon(1e-12));
}

TEST_CASE("marginal simulation projects exactly the kept names") {
    const Gen::Marginal m = marginal_node(3);
    RngStream root(7);
    for (int i = 0; i < 100; ++i) {
        RngStream rng = root.child(i);
        const SimResult s = marginal_simulate(m, rng);
        REQUIRE(s.trace.size() == 1);
        CHECK(s.trace.contains("c1"));
        CHECK_FALSE(s.log_weight.is_zero());
    }
}

TEST_CASE("marginal simulation weight has unbiased reciprocal per kept value") {
    const Gen::Marginal m = marginal_node(5);
    testutil::Moments inv_true, inv_false;
    RngStream root(8);
    for (int i = 0; i < 20000; ++i) {
        RngStream rng = root.child(i);
        const SimResult s = marginal_simulate(m, rng);
        const double inv_w = 1.0 / s.log_weight.linear().val;
        (s.trace.find("c1")->as_bool() ? inv_true : inv_false).add(inv_w);
    }
    CHECK(testutil::within_4se(inv_true, 1.0 / 0.6));
    CHECK(testutil::within_4se(inv_false, 1.0 / 0.4));
}

TEST_CASE("marginal simulation weights concentrate as particles grow") {
    std::map<int, double> var;
    for (int n : {1, 10, 100}) {
        const Gen::Marginal m = marginal_node(n);
        testutil::Moments mo;
        RngStream root(800 + n);
        for (int i = 0; i < 4000; ++i) {
            RngStream rng = root.child(i);
            const SimResult s = marginal_simulate(m, rng);
            if (s.trace.find("c1")->as_bool()) mo.add(s.log_weight.linear().val);
        }
        var[n] = mo.variance();
    }
    CHECK(var[10] < var[1]);
    CHECK(var[100] < var[10]);
}

TEST_CASE("marginal estimate tangents match finite differences of the mean estimate") {
    // live parameter inside the target: c1 ~ flip(p) with d/dp tracked
    auto node_at = [](double p, double tan) {
        GenPtr inner = gp_sample(
            Dist::flip(RealValue{Dual{p, tan, -1}, Smoothness::Smooth, "p"},
                       StrategyTag::Reinforce),
            "c1", [](const GroundValue& c1) {
                const double p2 = c1.as_bool() ? 0.7 : 0.2;
                return gp_sample(Dist::flip(star_real(p2), StrategyTag::Reinforce), "c2",
                                 [c1](const GroundValue& c2) {
                                     return gp_return(GroundValue::tuple({c1, c2}));
                                 });
            });
        return Gen::Marginal{{"c1"}, std::move(inner), [](const Trace&) {
                                 return ImportanceAlg{aux_proposal_uniform(), 3};
                             }};
    };
    const Trace kept = Trace::single("c1", GroundValue::boolean(true));
    const double p0 = 0.6, h = 1e-4;
    testutil::Moments tangent, fd;
    RngStream root(515);
    for (int i = 0; i < 20000; ++i) {
        RngStream r0 = root.child(i);
        const Dual est = marginal_density_est(node_at(p0, 1.0), kept)
                             .run([](const LogWeight& w, RngStream&) { return w.linear(); }, r0);
        tangent.add(est.tan);
        // common random numbers: identical stream at both shifts
        RngStream rp = root.child(i), rm = root.child(i);
        const double ep = density_draw(marginal_density_est(node_at(p0 + h, 0.0), kept), rp);
        const double em = density_draw(marginal_density_est(node_at(p0 - h, 0.0), kept), rm);
        fd.add((ep - em) / (2.0 * h));
    }
    const double se =
        std::sqrt(tangent.std_err() * tangent.std_err() + fd.std_err() * fd.std_err());
    CHECK(std::fabs(tangent.mean() - fd.mean()) <= 4.0 * se + 1e-6);
    // the exact derivative of the marginal at c1=true is d/dp (p) = 1
    CHECK(testutil::within_4se(tangent, 1.0));
}

TEST_CASE("proposal names the target never consumes are a structural error") {
    AlgFn alg = [](const Trace&) {
        GenPtr prop = gp_sample(Dist::flip(star_real(0.5), StrategyTag::Reinforce), "junk",
                                [](const GroundValue& v) { return gp_return(v); });
        return ImportanceAlg{std::move(prop), 1};
    };
    const Gen::Marginal m{{"c1"}, joint_two_flip(), std::move(alg)};
    const Trace kept = Trace::single("c1", GroundValue::boolean(true));
    RngStream rng(4);
    CHECK_THROWS_AS((void)density_draw(marginal_density_est(m, kept), rng), DomainError);
}

TEST_CASE("all-zero particle sets give a zero estimate, not an error") {
    // impossible observation inside the target zeroes every particle
    GenPtr impossible = gp_sample(
        Dist::flip(star_real(0.6), StrategyTag::Reinforce), "c1", [](const GroundValue& c1) {
            return gp_sample(Dist::flip(star_real(0.5), StrategyTag::Reinforce), "c2",
                             [c1](const GroundValue& c2) {
                                 return gp_observe(Dist::flip(star_real(1.0)),
                                                   GroundValue::boolean(false), gp_return(c2));
                             });
        });
    const Gen::Marginal m{{"c1"}, std::move(impossible),
                          [](const Trace&) {
                              return ImportanceAlg{aux_proposal_uniform(), 3};
                          }};
    RngStream rng(4);
    const double est =
        density_draw(marginal_density_est(m, Trace::single("c1", GroundValue::boolean(true))),
                     rng);
    CHECK(est == 0.0);
}

TEST_CASE("marginal program density: superset traces give the constant zero") {
    const GenPtr prog = gp_marginal({"c1"}, joint_two_flip(), [](const Trace&) {
        return ImportanceAlg{aux_proposal_uniform(), 2};
    });
    Trace superset = Trace::single("c1", GroundValue::boolean(true));
    superset = superset.with("extra", GroundValue::integer(5));
    RngStream rng(12);
    CHECK(density_estimate_sample(prog, superset, rng).val == 0.0);
    RngStream rng2(13);
    CHECK(density_estimate_sample(prog, Trace{}, rng2).val == 0.0);  // kept name missing
}

TEST_CASE("single-particle SIR reduces to its proposal") {
    const ZooEntry& e = zoo_get("twoflip_post");
    const GenPtr target = e.model(Params::frozen(e.init));
    const GenPtr prop = joint_two_flip();
    const Gen::Normalize node{target, ImportanceAlg{prop, 1}};
    std::map<std::string, int> counts;
    RngStream root(21);
    const int n = 40000;
    const Enumeration prop_en = enumerate_discrete(prop);
    for (int i = 0; i < n; ++i) {
        RngStream rng = root.child(i);
        const SimResult s = normalize_simulate(node, rng);
        counts[trace_to_json(s.trace)] += 1;
        // weight reduces to the proposal density of the draw
        CHECK(s.log_weight.linear().val ==
              doctest::Approx(prop_en.find(s.trace)->density).epsilon(1e-9));
    }
    std::vector<double> obs, exp;
    for (const auto& z : prop_en.entries) {
        obs.push_back(counts[trace_to_json(z.trace)]);
        exp.push_back(z.density * n);
    }
    CHECK(testutil::chi2_statistic(obs, exp) <
          testutil::chi2_quantile(0.999, static_cast<double>(obs.size() - 1)));
}

TEST_CASE("two-particle SIR output law matches the exhaustive oracle") {
    const ZooEntry& e = zoo_get("twoflip_post");
    const GenPtr target = e.model(Params::frozen(e.init));
    const GenPtr prop = joint_two_flip();
    const Gen::Normalize node{target, ImportanceAlg{prop, 2}};
    const std::map<std::string, double> oracle = sir2_oracle(target, prop);

    std::map<std::string, int> counts;
    const int n = 100000;
    RngStream root(22);
    for (int i = 0; i < n; ++i) {
        RngStream rng = root.child(i);
        counts[trace_to_json(normalize_simulate(node, rng).trace)] += 1;
    }
    std::vector<double> obs, exp;
    for (const auto& [key, p] : oracle) {
        obs.push_back(counts[key]);
        exp.push_back(p * n);
    }
    CHECK(testutil::chi2_statistic(obs, exp) <
          testutil::chi2_quantile(0.999, static_cast<double>(obs.size() - 1)));
}

TEST_CASE("SIR density estimates are unbiased for the SIR output law") {
    const ZooEntry& e = zoo_get("twoflip_post");
    const GenPtr target = e.model(Params::frozen(e.init));
    const GenPtr prop = joint_two_flip();
    const Gen::Normalize node{target, ImportanceAlg{prop, 2}};
    const std::map<std::string, double> oracle = sir2_oracle(target, prop);
    const Enumeration prop_en = enumerate_discrete(prop);
    int checked = 0;
    for (const auto& z : prop_en.entries) {
        testutil::Moments mo;
        RngStream root(400 + checked);
        for (int i = 0; i < 20000; ++i)
            mo.add(density_draw(normalize_density_est(node, z.trace), root.child(i)));
        CHECK(testutil::within_4se(mo, oracle.at(trace_to_json(z.trace))));
        ++checked;
    }
    CHECK(checked == 4);
}

TEST_CASE("SIR simulation with all-zero weights is a resampling error") {
    GenPtr impossible =
        gp_observe(Dist::flip(star_real(1.0)), GroundValue::boolean(false),
                   joint_two_flip());
    const Gen::Normalize node{std::move(impossible), ImportanceAlg{joint_two_flip(), 2}};
    RngStream rng(5);
    CHECK_THROWS_AS((void)normalize_simulate(node, rng), DomainError);
}
