#include <benchmark/benchmark.h>

#include <memory>

#include <radproj/energy.hpp>
#include <radproj/generators.hpp>
#include <radproj/projections.hpp>

using namespace radproj;

namespace {

const GaussianMixture kMix{2, {{0, 0, 0}, {0.9, 0.4, 0}}, {0.25, 0.2}, {0.6, 0.4}, 4.5};

void BM_RieszPairwise(benchmark::State& state) {
    auto mu = kMix.sample(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(riesz_energy(mu, 1.2).value);
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RieszPairwise)->RangeMultiplier(2)->Range(500, 4000)->Complexity(benchmark::oNSquared);

void BM_RieszGrid(benchmark::State& state) {
    auto g = rasterize(kMix, LatticeSpec::covering(2, kMix.bounding_box(), 0.0, static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(riesz_energy_grid(g, 1.2).value);
}
BENCHMARK(BM_RieszGrid)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_RadialProject(benchmark::State& state) {
    auto g = rasterize(kMix, LatticeSpec::covering(2, kMix.bounding_box(), 0.0, static_cast<std::size_t>(state.range(0))));
    auto sphere = std::make_shared<const SphereGrid>(SphereGrid::make(2, 720));
    const auto mu_x = weight_riesz(g, {3.5, 0.5, 0}, FiberConvention::full_line);
    for (auto _ : state) benchmark::DoNotOptimize(radial_project(mu_x, sphere).max_value());
}
BENCHMARK(BM_RadialProject)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_OrthProject(benchmark::State& state) {
    auto g = rasterize(kMix, LatticeSpec::covering(2, kMix.bounding_box(), 0.0, static_cast<std::size_t>(state.range(0))));
    const Direction e(2, {0.6, 0.8, 0});
    for (auto _ : state) benchmark::DoNotOptimize(orth_project(g, e, HistogramSpec{512, 0.0}).mass());
}
BENCHMARK(BM_OrthProject)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
