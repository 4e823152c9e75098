#include <benchmark/benchmark.h>

#include "provi/compile.hpp"
#include "provi/objectives.hpp"
#include "provi/reverse.hpp"
#include "provi/zoo.hpp"

using namespace provi;

namespace {

LossEst strategy_loss(Dist d) {
    Prob<Dual> m{[d = std::move(d)](const Prob<Dual>::Cont& k, RngStream& rng) {
        return dist_estimate(d, "x",
                             [&](const GroundValue& x, RngStream& r) {
                                 if (x.type() == GroundType::Real) {
                                     const Dual v = x.as_real().d;
                                     return k(v * v, r);
                                 }
                                 if (x.type() == GroundType::Bool)
                                     return k(make_dual(x.as_bool() ? 2.0 : -1.0), r);
                                 const double v = static_cast<double>(x.as_int());
                                 return k(make_dual(v), r);
                             },
                             rng);
    }};
    return expect(std::move(m));
}

void run_strategy(benchmark::State& state, const Dist& d) {
    const LossEst est = strategy_loss(d);
    RngStream root(1234);
    std::uint64_t j = 0;
    for (auto _ : state) {
        RngStream rj = root.child(j++);
        benchmark::DoNotOptimize(est.sample(rj));
    }
}

const RealValue theta = smooth_real(make_dual(1.0, 1.0), "theta");
const RealValue p_param = smooth_real(make_dual(0.3, 1.0), "p");

void BM_NormalReparam(benchmark::State& s) {
    run_strategy(s, Dist::normal(theta, star_real(1.0), StrategyTag::Reparam));
}
void BM_NormalReinforce(benchmark::State& s) {
    run_strategy(s, Dist::normal(theta, star_real(1.0), StrategyTag::Reinforce));
}
void BM_FlipEnum(benchmark::State& s) { run_strategy(s, Dist::flip(p_param, StrategyTag::Enum)); }
void BM_FlipReinforce(benchmark::State& s) {
    run_strategy(s, Dist::flip(p_param, StrategyTag::Reinforce));
}
void BM_FlipMvd(benchmark::State& s) { run_strategy(s, Dist::flip(p_param, StrategyTag::Mvd)); }
void BM_PoissonReinforce(benchmark::State& s) {
    run_strategy(s, Dist::poisson(smooth_real(make_dual(2.0, 1.0), "rate")));
}

void BM_SimulateConj(benchmark::State& state) {
    const ZooEntry& e = zoo_get("conj");
    const GenPtr prog = e.model(Params::frozen(e.init));
    RngStream root(7);
    std::uint64_t j = 0;
    for (auto _ : state) {
        RngStream rj = root.child(j++);
        benchmark::DoNotOptimize(simulate(prog, rj));
    }
}

void BM_DensityConj(benchmark::State& state) {
    const ZooEntry& e = zoo_get("conj");
    const GenPtr prog = e.model(Params::frozen(e.init));
    RngStream rng(7);
    const SimResult s = simulate(prog, rng);
    for (auto _ : state) benchmark::DoNotOptimize(density(prog, s.trace));
}

void BM_ElboGradForward(benchmark::State& state) {
    const ZooEntry& e = zoo_get("conj");
    const LossFn loss = elbo(e.model, e.guide("naive"));
    RngStream root(7);
    std::uint64_t j = 0;
    for (auto _ : state) {
        RngStream rj = root.child(j++);
        benchmark::DoNotOptimize(adev_grad(loss, e.init.basis_direction(0), rj));
    }
}

void BM_ElboGradReverse(benchmark::State& state) {
    const ZooEntry& e = zoo_get("conj");
    const LossFn loss = elbo(e.model, e.guide("naive"));
    RngStream root(7);
    std::uint64_t j = 0;
    for (auto _ : state) {
        RngStream rj = root.child(j++);
        benchmark::DoNotOptimize(reverse_grad(loss, e.init, rj));
    }
}

}  // namespace

BENCHMARK(BM_NormalReparam);
BENCHMARK(BM_NormalReinforce);
BENCHMARK(BM_FlipEnum);
BENCHMARK(BM_FlipReinforce);
BENCHMARK(BM_FlipMvd);
BENCHMARK(BM_PoissonReinforce);
BENCHMARK(BM_SimulateConj);
BENCHMARK(BM_DensityConj);
BENCHMARK(BM_ElboGradForward);
BENCHMARK(BM_ElboGradReverse);

BENCHMARK_MAIN();
