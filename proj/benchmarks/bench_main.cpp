#include <benchmark/benchmark.h>

#include "netpot/ball.hpp"
#include "netpot/green.hpp"
#include "netpot/minimax.hpp"
#include "netpot/network.hpp"
#include "netpot/solver.hpp"

using namespace netpot;

namespace {

NetworkSource grid() {
    GeneratorSpec s;
    s.kind = GeneratorKind::Grid2d;
    return generate(s);
}

void BM_BallExtraction(benchmark::State& state) {
    auto g = grid();
    for (auto _ : state)
        benchmark::DoNotOptimize(extract_ball(g, int(state.range(0))));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BallExtraction)->RangeMultiplier(2)->Range(16, 256)->Unit(benchmark::kMillisecond);

void BM_Factorization(benchmark::State& state) {
    auto ball = make_ball(grid(), int(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(DirichletSystem(ball, {0}));
}
BENCHMARK(BM_Factorization)->RangeMultiplier(2)->Range(16, 256)->Unit(benchmark::kMillisecond);

void BM_EffectiveResistance(benchmark::State& state) {
    auto ball = make_ball(grid(), int(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(effective_resistance(ball));
}
BENCHMARK(BM_EffectiveResistance)->RangeMultiplier(2)->Range(16, 256)->Unit(benchmark::kMillisecond);

void BM_HarmonicMeasure(benchmark::State& state) {
    auto ball = make_ball(grid(), int(state.range(0)));
    DirichletSystem sys(ball, {0});
    for (auto _ : state)
        benchmark::DoNotOptimize(harmonic_measure(sys));
}
BENCHMARK(BM_HarmonicMeasure)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMillisecond);

void BM_Minimax(benchmark::State& state) {
    const int r = int(state.range(0));
    GreenOperator op(make_ball(grid(), 2 * r));
    auto problem = make_minimax_problem(op, r);
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_minimax(op, problem));
}
BENCHMARK(BM_Minimax)->RangeMultiplier(2)->Range(4, 32)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
