#include <doctest.h>

#include "provi/rng.hpp"
#include "provi/trace.hpp"
#include "testutil.hpp"

using namespace provi;

namespace {

Trace make_trace(std::initializer_list<std::pair<const char*, GroundValue>> kvs) {
    Trace t;
    for (const auto& [k, v] : kvs) t = t.with(k, v);
    return t;
}

GroundValue rnd_value(RngStream& rng) {
    switch (rng.next_u64() % 4) {
        case 0: return GroundValue::boolean(rng.bernoulli(0.5));
        case 1: return GroundValue::integer(static_cast<std::int64_t>(rng.next_u64() % 10));
        case 2: return GroundValue::real(rng.normal());
        default: return GroundValue::str(std::string(1, 'a' + rng.next_u64() % 26));
    }
}

Trace rnd_trace(RngStream& rng, int max_len = 6) {
    Trace t;
    const int n = static_cast<int>(rng.next_u64() % (max_len + 1));
    for (int i = 0; i < n; ++i) t = t.with("k" + std::to_string(i), rnd_value(rng));
    return t;
}

}  // namespace

TEST_CASE("pop hit returns value, weight 1, trace without the key") {
    const Trace u = make_trace({{"x", GroundValue::real(0.5)}});
    const PopResult r = trace_pop(u, "x", GroundType::Real);
    CHECK(r.weight == 1.0);
    CHECK(r.value.as_real().d.val == 0.5);
    CHECK(r.rest.empty());
}

TEST_CASE("pop miss returns the type default, weight 0, empty trace") {
    const PopResult r = trace_pop(Trace{}, "x", GroundType::Real);
    CHECK(r.weight == 0.0);
    CHECK(r.value.as_real().d.val == 0.0);
    CHECK(r.value.as_real().smooth == Smoothness::Star);
    CHECK(r.rest.empty());
}

TEST_CASE("pop type mismatch falls into the default branch") {
    const Trace u = make_trace({{"x", GroundValue::boolean(true)}});
    const PopResult r = trace_pop(u, "x", GroundType::Real);
    CHECK(r.weight == 0.0);
    CHECK(r.value.as_real().d.val == 0.0);
    CHECK(r.rest.empty());
}

TEST_CASE("pop misses are idempotent") {
    const Trace u = make_trace({{"a", GroundValue::integer(1)}});
    const PopResult r1 = trace_pop(u, "missing", GroundType::Int);
    const PopResult r2 = trace_pop(r1.rest, "missing", GroundType::Int);
    CHECK(r1.weight == 0.0);
    CHECK(r2.weight == 0.0);
    CHECK(r1.value.same_value(r2.value));
    CHECK(r1.rest.same_mapping(r2.rest));
}

TEST_CASE("concat of disjoint traces preserves both sides") {
    const Trace a = make_trace({{"a", GroundValue::integer(1)}});
    const Trace b = make_trace({{"b", GroundValue::integer(2)}});
    const Trace c = trace_concat(a, b);
    CHECK(c.size() == 2);
    CHECK(c.find("a")->as_int() == 1);
    CHECK(c.find("b")->as_int() == 2);
    CHECK(trace_concat(a, Trace{}).same_mapping(a));
}

TEST_CASE("concat clash names the offending key") {
    const Trace a = make_trace({{"a", GroundValue::integer(1)}});
    const Trace b = make_trace({{"a", GroundValue::integer(2)}});
    CHECK_THROWS_WITH_AS(trace_concat(a, b), doctest::Contains("'a'"), DisjointnessViolation);
}

TEST_CASE("subtrace/remainder split") {
    const Trace u = make_trace({{"a", GroundValue::integer(1)},
                                {"b", GroundValue::integer(2)},
                                {"c", GroundValue::integer(3)}});
    const auto [in, out] = trace_subtrace_remainder(u, {"a", "c"});
    CHECK(in.size() == 2);
    CHECK(out.size() == 1);
    CHECK(out.find("b") != nullptr);

    const Trace single = make_trace({{"a", GroundValue::integer(1)}});
    const auto [in2, out2] = trace_subtrace_remainder(single, {});
    CHECK(in2.empty());
    CHECK(out2.same_mapping(single));
}

TEST_CASE("property: pop then concat reconstructs the mapping") {
    RngStream rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Trace u = rnd_trace(rng);
        const std::string key = "k" + std::to_string(rng.next_u64() % 7);
        for (GroundType ty : {GroundType::Bool, GroundType::Int, GroundType::Real}) {
            const PopResult r = trace_pop(u, key, ty);
            if (r.weight == 1.0) {
                CHECK(trace_concat(r.rest, Trace::single(key, r.value)).same_mapping(u));
            } else {
                CHECK(r.rest.empty());
            }
        }
    }
}

TEST_CASE("property: concat is associative with empty identity on disjoint traces") {
    RngStream rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        Trace a, b, c;
        const int n = 1 + static_cast<int>(rng.next_u64() % 5);
        for (int i = 0; i < n; ++i) {
            const GroundValue v = rnd_value(rng);
            switch (rng.next_u64() % 3) {
                case 0: a = a.with("n" + std::to_string(i), v); break;
                case 1: b = b.with("n" + std::to_string(i), v); break;
                default: c = c.with("n" + std::to_string(i), v); break;
            }
        }
        const Trace left = trace_concat(trace_concat(a, b), c);
        const Trace right = trace_concat(a, trace_concat(b, c));
        CHECK(left.same_mapping(right));
        CHECK(trace_concat(Trace{}, left).same_mapping(left));
    }
}

TEST_CASE("json round trip keeps mapping and smoothness tags") {
    RngStream rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        Trace u = rnd_trace(rng);
        u = u.with("smooth", GroundValue::real(1.5, Smoothness::Smooth, "origin"));
        const Trace back = trace_from_json(trace_to_json(u));
        CHECK(back.same_mapping(u));
        CHECK(back.find("smooth")->as_real().smooth == Smoothness::Smooth);
    }
    const std::string text = trace_to_json(make_trace({{"x", GroundValue::real(0.5)}}));
    CHECK(text == R"({"x":{"t":"real","v":0.5,"smooth":false}})");
}

TEST_CASE("dual arithmetic propagates tangents") {
    const Dual x = make_dual(2.0, 1.0);
    const Dual y = x * x + 3.0 * x;  // d/dx = 2x + 3 = 7
    CHECK(y.val == doctest::Approx(10.0));
    CHECK(y.tan == doctest::Approx(7.0));
    const Dual z = dlog(dexp(x));
    CHECK(z.val == doctest::Approx(2.0));
    CHECK(z.tan == doctest::Approx(1.0));
}

TEST_CASE("tape backward matches forward tangents on a scalar chain") {
    TapeScope scope;
    const Dual a = tape_leaf(1.2);
    const Dual b = tape_leaf(-0.7);
    const Dual f = dsin(a * b) + a * a / (2.0 + b);
    const auto adj = scope.tape().backward(f.node);
    // forward-mode oracle
    const Dual fa = [&] {
        const Dual aa = make_dual(1.2, 1.0), bb = make_dual(-0.7, 0.0);
        return dsin(aa * bb) + aa * aa / (2.0 + bb);
    }();
    const Dual fb = [&] {
        const Dual aa = make_dual(1.2, 0.0), bb = make_dual(-0.7, 1.0);
        return dsin(aa * bb) + aa * aa / (2.0 + bb);
    }();
    CHECK(adj[a.node] == doctest::Approx(fa.tan).epsilon(1e-12));
    CHECK(adj[b.node] == doctest::Approx(fb.tan).epsilon(1e-12));
}

TEST_CASE("smoothness checks fire only for smooth reals at non-smooth consumers") {
    const RealValue smooth = smooth_real(make_dual(1.0), "x");
    const RealValue star = star_real(1.0);
    CHECK_THROWS_AS((void)rv_less(smooth, star), SmoothnessViolation);
    CHECK(rv_less(star, star_real(2.0)));
    CHECK(violates_smoothness(GroundValue::real(RealValue{make_dual(0.0), Smoothness::Smooth, "s"}),
                              "<"));
    CHECK_FALSE(violates_smoothness(GroundValue::real(0.0), "<"));
    CHECK_FALSE(violates_smoothness(GroundValue::boolean(true), "<"));
    // promotion: any smooth input makes the output smooth
    const RealValue sum = rv_add(smooth, star);
    CHECK(sum.smooth == Smoothness::Smooth);
    CHECK(sum.origin == "x");
    const RealValue both_star = rv_mul(star, star);
    CHECK(both_star.smooth == Smoothness::Star);
}
