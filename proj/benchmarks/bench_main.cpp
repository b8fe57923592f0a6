#include "dpsched/chain.hpp"
#include "dpsched/heuristic.hpp"
#include "dpsched/lp.hpp"
#include "dpsched/scheduler.hpp"
#include "dpsched/sim.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace dpsched;

ValidatedSpec two_channel(int K)
{
    return validate_spec({{0.575, 0.3, 0.125}, {0.6, 0.4}, {10.14, 0.103}, K});
}

ValidatedSpec four_channel(int K)
{
    return validate_spec({{0.575, 0.3, 0.125}, {0.135, 0.239, 0.232, 0.394}, {10, 5, 2, 1}, K});
}

double mid_budget(const ValidatedSpec& spec)
{
    return 0.5 * (min_stable_power(spec) + saturation_power(spec));
}

void BM_SolveBudget(benchmark::State& state)
{
    auto spec = four_channel(static_cast<int>(state.range(0)));
    double p = mid_budget(spec);
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_budget(spec, p));
}
BENCHMARK(BM_SolveBudget)->Arg(10)->Arg(20)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_Analyze(benchmark::State& state)
{
    auto spec = four_channel(static_cast<int>(state.range(0)));
    auto policy = solve_budget(spec, mid_budget(spec)).recovered.policy;
    for (auto _ : state)
        benchmark::DoNotOptimize(analyze(spec, policy));
}
BENCHMARK(BM_Analyze)->Arg(30)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_BuildTable(benchmark::State& state)
{
    auto spec = four_channel(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(build_table(spec, 1));
}
BENCHMARK(BM_BuildTable)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state)
{
    auto spec = two_channel(30);
    auto policy = solve_budget(spec, mid_budget(spec)).recovered.policy;
    SimConfig cfg;
    cfg.slots = state.range(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate(spec, policy, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
