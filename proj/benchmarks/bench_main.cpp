#include <benchmark/benchmark.h>

#include "skeltrop/gallery.hpp"
#include "skeltrop/linearization.hpp"

#include <random>

using namespace skeltrop;

namespace {

IntMat random_matrix(std::size_t n, int seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> entry(-30, 30);
    IntMat m(n, std::vector<Int>(n));
    for (auto& row : m)
        for (auto& x : row) x = entry(rng);
    return m;
}

void BM_SmithNormalForm(benchmark::State& state) {
    auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 7);
    for (auto _ : state) benchmark::DoNotOptimize(smith_normal_form(m).d);
}
BENCHMARK(BM_SmithNormalForm)->Arg(4)->Arg(8)->Arg(12);

void BM_StabilizeDivergent(benchmark::State& state) {
    auto c = gallery::divergent_demo(static_cast<unsigned>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(stabilize(c, 20).iterations);
}
BENCHMARK(BM_StabilizeDivergent)->Arg(2)->Arg(5);

void BM_ComponentGroupBanana(benchmark::State& state) {
    AugmentedMetricGraph g;
    g.add_vertex(Vertex{"u", 0, ""});
    g.add_vertex(Vertex{"w", 0, ""});
    for (int k = 0; k < state.range(0); ++k)
        g.add_edge(Edge{"e" + std::to_string(k), "u", "w", Rational(1)});
    for (auto _ : state) benchmark::DoNotOptimize(component_group(g).invariant_factors.size());
}
BENCHMARK(BM_ComponentGroupBanana)->Arg(8)->Arg(16)->Arg(32);

void BM_HeckeOperator(benchmark::State& state) {
    auto c = gallery::hecke_Up(13, static_cast<unsigned>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(correspondence_operator(c).op.size());
}
BENCHMARK(BM_HeckeOperator)->Arg(1)->Arg(4);

} // namespace

BENCHMARK_MAIN();
