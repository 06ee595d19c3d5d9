#include <benchmark/benchmark.h>

#include "subtest/closeness.hpp"
#include "subtest/collision.hpp"
#include "subtest/distribution.hpp"
#include "subtest/harness.hpp"
#include "subtest/markov.hpp"

using namespace subtest;

namespace {

ExplicitDistribution skewed_distribution(int64_t n) {
    std::vector<double> weights(n);
    for (int64_t i = 0; i < n; ++i) weights[i] = 1.0 / static_cast<double>(i + 1);
    return normalize_weights(std::move(weights));
}

void BM_InverseCdfDraw(benchmark::State& state) {
    auto s = make_sampler(skewed_distribution(state.range(0)));
    Rng rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(s.draw(rng));
}
BENCHMARK(BM_InverseCdfDraw)->Arg(16)->Arg(256)->Arg(4096)->Arg(65536);

void BM_AliasDraw(benchmark::State& state) {
    auto s = make_alias_sampler(skewed_distribution(state.range(0)));
    Rng rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(s.draw(rng));
}
BENCHMARK(BM_AliasDraw)->Arg(16)->Arg(256)->Arg(4096)->Arg(65536);

void BM_NextNodeBinarySearch(benchmark::State& state) {
    auto chain = lazy_complete_chain(state.range(0));
    Rng rng(2);
    int64_t u = 0;
    for (auto _ : state) {
        u = next_node(chain, u, rng);
        benchmark::DoNotOptimize(u);
    }
}
BENCHMARK(BM_NextNodeBinarySearch)->Arg(16)->Arg(256)->Arg(1024);

void BM_NextNodeAlias(benchmark::State& state) {
    auto chain = lazy_complete_chain(state.range(0));
    AliasWalker walker(chain);
    Rng rng(2);
    int64_t u = 0;
    for (auto _ : state) {
        u = walker.next(u, rng);
        benchmark::DoNotOptimize(u);
    }
}
BENCHMARK(BM_NextNodeAlias)->Arg(16)->Arg(256)->Arg(1024);

void BM_CollisionRound(benchmark::State& state) {
    const int64_t m = state.range(0);
    auto s = make_sampler(uniform_distribution(1024));
    Rng rng(3);
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_collision_counts(s, s, m, rng));
    state.SetItemsProcessed(state.iterations() * 4 * m);
}
BENCHMARK(BM_CollisionRound)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_L2DistanceTest(benchmark::State& state) {
    auto s = make_sampler(uniform_distribution(100));
    TestParams params;
    params.epsilon = 0.2;
    params.delta = 0.1;
    const int64_t m = required_m_l2(0.01, params.epsilon, params.c_m);
    Rng rng(4);
    for (auto _ : state) benchmark::DoNotOptimize(l2_distance_test(s, s, m, params, rng));
}
BENCHMARK(BM_L2DistanceTest);

void BM_L1DistanceTest(benchmark::State& state) {
    auto s = make_sampler(uniform_distribution(216));
    TestParams params;
    params.epsilon = 0.5;
    params.delta = 0.1;
    Rng rng(5);
    for (auto _ : state) benchmark::DoNotOptimize(l1_distance_test(s, s, params, rng));
}
BENCHMARK(BM_L1DistanceTest)->Unit(benchmark::kMillisecond);

void BM_ExactTStep(benchmark::State& state) {
    auto chain = lazy_complete_chain(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(exact_t_step(chain, 0, 10));
}
BENCHMARK(BM_ExactTStep)->Arg(64)->Arg(256);

void BM_Poisson(benchmark::State& state) {
    const double lambda = static_cast<double>(state.range(0));
    Rng rng(6);
    for (auto _ : state) benchmark::DoNotOptimize(poisson(lambda, rng));
}
BENCHMARK(BM_Poisson)->Arg(5)->Arg(100)->Arg(10000);

} // namespace

BENCHMARK_MAIN();
