#include "orchard_duo/analytics.hpp"
#include "orchard_duo/ga.hpp"
#include "orchard_duo/integrator.hpp"
#include "orchard_duo/reproduction.hpp"
#include "orchard_duo/sensitivity.hpp"

#include <benchmark/benchmark.h>

namespace od = orchard_duo;

namespace {

od::Scenario text_mechanical()
{
    od::Scenario s = od::baseline_scenario();
    od::install_controls(s, {0.29, 0.395, 0.07, 0.67});
    return s;
}

void BM_Rhs(benchmark::State& state)
{
    const od::Scenario s = text_mechanical();
    const od::EffectiveRates h1 = s.rates(1);
    const od::EffectiveRates h2 = s.rates(2);
    od::SystemState x = s.initial;
    x[od::Compartment::I1v] = 10.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(od::rhs(x, s, h1, h2));
    }
}
BENCHMARK(BM_Rhs);

void BM_IntegrateToSteadyState(benchmark::State& state)
{
    od::Scenario s = text_mechanical();
    s.dt_months = 0.01 * static_cast<double>(state.range(0));
    for (auto _ : state) {
        const od::Trajectory t = od::integrate(s);
        benchmark::DoNotOptimize(t.back());
    }
}
BENCHMARK(BM_IntegrateToSteadyState)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_GlobalR0Spectral(benchmark::State& state)
{
    const od::Scenario s = text_mechanical();
    for (auto _ : state) {
        benchmark::DoNotOptimize(od::global_r0_spectral(s));
    }
}
BENCHMARK(BM_GlobalR0Spectral)->Unit(benchmark::kMicrosecond);

void BM_GlobalR0ClosedUnchecked(benchmark::State& state)
{
    const od::Scenario s = text_mechanical();
    for (auto _ : state) {
        benchmark::DoNotOptimize(od::global_r0_closed_unchecked(s));
    }
}
BENCHMARK(BM_GlobalR0ClosedUnchecked);

void BM_SensitivityRun(benchmark::State& state)
{
    const od::Scenario s = od::baseline_scenario();
    const auto ranges = od::default_ranges(od::StrategyKind::Mechanical);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(od::sensitivity_run(s, ranges, n, 7));
    }
}
BENCHMARK(BM_SensitivityRun)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_GaEvaluate(benchmark::State& state)
{
    od::Scenario s = od::baseline_scenario();
    s.horizon_months = 6000.0;
    s.dt_months = 0.05;
    od::GaConfig cfg;
    cfg.r1_target = 1000.0;
    cfg.r2_target = 1000.0;
    cfg.integrator.stride = 10;
    for (auto _ : state) {
        benchmark::DoNotOptimize(od::evaluate({0.99, 0.05, 0.99, 0.05}, s, cfg));
    }
}
BENCHMARK(BM_GaEvaluate)->Unit(benchmark::kMillisecond);

void BM_Crossover(benchmark::State& state)
{
    od::Rng rng(3);
    const od::Genes a{0.1, 0.2, 0.3, 0.4};
    const od::Genes b{0.9, 0.8, 0.7, 0.6};
    for (auto _ : state) {
        benchmark::DoNotOptimize(od::crossover(a, b, rng));
    }
}
BENCHMARK(BM_Crossover);

} // namespace

BENCHMARK_MAIN();
