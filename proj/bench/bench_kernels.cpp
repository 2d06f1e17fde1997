// Parallel kernels against their serial references.
//   build/bench/sepskel_bench --benchmark_filter=Sample

#include <benchmark/benchmark.h>

#include <random>

#include "sepskel/ingest.hpp"
#include "sepskel/packing.hpp"
#include "sepskel/separators.hpp"
#include "support/shapes.hpp"

using namespace sepskel;

namespace {

const SpatialGraph& creature() {
    static const SpatialGraph g = testing::mesh_graph(testing::creature_mesh(2));
    return g;
}

std::vector<Vec3> cloud(std::size_t n) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 20.0);
    std::vector<Vec3> p(n);
    for (auto& x : p) x = Vec3(u(rng), u(rng), u(rng));
    return p;
}

const SeparatorSet& harvested() {
    static const SeparatorSet s = sample_separators_serial(creature(), kDefaultTau, false, 3);
    return s;
}

void SampleSerial(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_separators_serial(creature(), kDefaultTau, false, 1));
}
BENCHMARK(SampleSerial)->Unit(benchmark::kMillisecond);

void SampleParallel(benchmark::State& state) {
    SamplingOptions o;
    o.seed = 1;
    o.threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sample_separators(creature(), o));
}
BENCHMARK(SampleParallel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void KnnBruteForce(benchmark::State& state) {
    const auto p = cloud(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(knn_within_radius_serial(p, 10, 2.0));
}
BENCHMARK(KnnBruteForce)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

void KnnGrid(benchmark::State& state) {
    const auto p = cloud(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(knn_within_radius(p, 10, 2.0));
}
BENCHMARK(KnnGrid)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

void PackAllPairs(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(pack_separators_serial(harvested()));
}
BENCHMARK(PackAllPairs)->Unit(benchmark::kMillisecond);

void PackIndexed(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(pack_separators(harvested()));
}
BENCHMARK(PackIndexed)->Unit(benchmark::kMillisecond);

void SaturateTwoRing(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(saturate(creature(), 2));
}
BENCHMARK(SaturateTwoRing)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
