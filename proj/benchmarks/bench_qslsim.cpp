#include <benchmark/benchmark.h>

#include <cmath>
#include <string>

#include "qslsim/analysis.hpp"
#include "qslsim/control.hpp"
#include "qslsim/decay.hpp"
#include "qslsim/propagate.hpp"
#include "qslsim/sweep.hpp"

using namespace qsl;

namespace {

const BathSpec kBath = BathSpec::from_beta(2.0);
const BlochVector kState = make_state(0.3, 0.0, 0.4);

void BM_PropagateClosed(benchmark::State& state) {
    const DecayProfile p = DecayProfile::jaynes_cummings(0.01, 100.0);
    double t = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(propagate_closed(kState, p, kBath, 0.0, t));
        t = t < 2.0 ? t + 1e-9 : 0.1;  // defeat caching without changing the work
    }
}
BENCHMARK(BM_PropagateClosed);

void BM_IntegrateOracle(benchmark::State& state) {
    const DecayProfile p = DecayProfile::damped_cosine(1.0, 2.0);
    const double tol = std::pow(10.0, -static_cast<double>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(integrate_oracle(kState, p, kBath, 0.0, 3.0, tol));
}
BENCHMARK(BM_IntegrateOracle)->Arg(6)->Arg(9)->Arg(11);

void BM_HitTime(benchmark::State& state) {
    const DecayProfile p = DecayProfile::jaynes_cummings(0.01, 100.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(hit_time(kState, p, kBath, HitSpec::ball(0.01)));
}
BENCHMARK(BM_HitTime);

void BM_StrategyCool(benchmark::State& state) {
    const DecayProfile p = DecayProfile::jaynes_cummings(0.01, 100.0);
    for (auto _ : state) benchmark::DoNotOptimize(strategy_cool(kState, p, kBath, 0.01));
}
BENCHMARK(BM_StrategyCool);

void BM_StrategyFlip(benchmark::State& state) {
    const DecayProfile p = DecayProfile::damped_cosine(1.0, 4.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(strategy_classB_flip(kState, p, kBath, 0.01));
}
BENCHMARK(BM_StrategyFlip);

void BM_SpeedupReport(benchmark::State& state) {
    const DecayProfile p = DecayProfile::jaynes_cummings(0.01, 100.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(speedup(kState, p, kBath, 0.01, Strategy::cool));
}
BENCHMARK(BM_SpeedupReport);

void BM_SweepRow(benchmark::State& state) {
    SweepSpec spec;
    spec.family = "jc";
    spec.axes = parse_grid("lambda=0.01:100:log" + std::to_string(state.range(0)));
    spec.fixed = {{"gamma0", 1.0}};
    spec.beta = 2.0;
    spec.initial = kState;
    spec.eps = 0.01;
    spec.strategy = Strategy::cool;
    spec.threads = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(run_sweep(spec));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SweepRow)->Args({64, 1})->Args({64, 4});

}  // namespace

BENCHMARK_MAIN();
