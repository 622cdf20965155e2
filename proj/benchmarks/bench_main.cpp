#include <benchmark/benchmark.h>

#include <cmath>

#include "hardylab/config.hpp"
#include "hardylab/functionals.hpp"
#include "hardylab/logweights.hpp"
#include "hardylab/probes.hpp"
#include "hardylab/transforms.hpp"

namespace {

using namespace hardylab;

void BM_WeightsZ(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    double t = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval_Z(k, t));
        t = t > 1e-6 ? t * 0.999 : 0.5;
    }
}
BENCHMARK(BM_WeightsZ)->Arg(1)->Arg(4)->Arg(16)->Arg(64);

void BM_InverseF(benchmark::State& state) {
    const int i = static_cast<int>(state.range(0));
    const double s = eval_X(i, 1e-3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval_F(i, s));
    }
}
BENCHMARK(BM_InverseF)->Arg(1)->Arg(3)->Arg(5);

void BM_EvalIk(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const HardyConfig cfg = HardyConfig::with_multiplier(3, 2.0, k, kDefaultMultiplier);
    const TrialProfile u = make_trial(Family::Polynomial, {2.0, 2.0}, cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval_Ik(u.radial, cfg).value);
    }
}
BENCHMARK(BM_EvalIk)->Arg(0)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_QuotientPair(benchmark::State& state) {
    const HardyConfig cfg = HardyConfig::with_multiplier(3, 2.0, 1, kDefaultMultiplier);
    const TrialProfile u = make_trial(Family::Polynomial, {2.0, 2.0}, cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(quotient_pair(u.radial, cfg).q_r);
    }
}
BENCHMARK(BM_QuotientPair)->Unit(benchmark::kMillisecond);

void BM_SweepRow(benchmark::State& state) {
    const HardyConfig cfg = HardyConfig::with_multiplier(3, 2.0, 1, kDefaultMultiplier);
    const std::vector<double> taus{static_cast<double>(state.range(0))};
    for (auto _ : state) {
        benchmark::DoNotOptimize(sharpness_sweep(Target::TheoremA, cfg, 0.5, taus).rows.size());
    }
}
BENCHMARK(BM_SweepRow)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
