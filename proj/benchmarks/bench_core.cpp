#include "aismarkov/graph_metrics.hpp"
#include "aismarkov/hexgrid.hpp"
#include "aismarkov/markov.hpp"
#include "aismarkov/trajectory.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <vector>

using namespace aismarkov;

namespace {

GridConfig grid_config() {
    GridConfig cfg;
    cfg.bbox = {44.0, -64.0, 50.0, -56.0};
    cfg.origin = {47.0, -60.0};
    return cfg;
}

/// A random walk of `n` one-minute samples inside the grid config's box.
ResampledTrajectory random_walk(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, 0.004);
    ResampledTrajectory rt{1, 0, 60, {}};
    LatLon p{47.0, -60.0};
    for (std::size_t k = 0; k < n; ++k) {
        p.lat = std::clamp(p.lat + step(rng), 44.5, 49.5);
        p.lon = std::clamp(p.lon + step(rng), -63.5, -56.5);
        rt.samples.push_back(p);
    }
    return rt;
}

} // namespace

static void BM_CellOf(benchmark::State& state) {
    const HexGrid grid(grid_config());
    const auto walk = random_walk(4096, 1);
    std::size_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(grid.cell_of(walk.samples[k++ & 4095]));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CellOf);

static void BM_ResampleSegment(benchmark::State& state) {
    std::mt19937_64 rng(2);
    RawSegment seg{1, {}};
    for (UnixSeconds t = 0; t < 10800; t += 5 + static_cast<UnixSeconds>(rng() % 60)) {
        seg.points.push_back({t, 47.0 + 1e-5 * static_cast<double>(t), -60.0});
    }
    std::size_t samples = 0;
    for (auto _ : state) {
        const auto rt = resample_segment(seg, 60);
        samples += rt.size();
        benchmark::DoNotOptimize(rt.samples.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(samples));
}
BENCHMARK(BM_ResampleSegment);

static void BM_DiscretizeAccumulate(benchmark::State& state) {
    const HexGrid grid(grid_config());
    const auto walk = random_walk(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) {
        TransitionStats stats;
        for (const auto& seq : discretize(walk, grid).sequences) accumulate(seq, stats);
        benchmark::DoNotOptimize(stats.total_transitions());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DiscretizeAccumulate)->Arg(1 << 12)->Arg(1 << 16);

static void BM_FitModel(benchmark::State& state) {
    const HexGrid grid(grid_config());
    TransitionStats stats;
    for (const auto& seq : discretize(random_walk(1 << 16, 4), grid).sequences) accumulate(seq, stats);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_markov_model(stats).states.size());
    }
}
BENCHMARK(BM_FitModel);

static void BM_Betweenness(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(5);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (int e = 0; e < 4; ++e) {
            edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(rng() % n));
        }
    }
    const SparseMatrix g = digraph_from_edges(n, edges);
    for (auto _ : state) {
        benchmark::DoNotOptimize(betweenness(g).data());
    }
}
BENCHMARK(BM_Betweenness)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);

static void BM_DetectCommunities(benchmark::State& state) {
    const HexGrid grid(grid_config());
    TransitionStats stats;
    for (const auto& seq : discretize(random_walk(1 << 16, 6), grid).sequences) accumulate(seq, stats);
    const SparseMatrix R = symmetrize(fit_markov_model(stats).P);
    for (auto _ : state) {
        benchmark::DoNotOptimize(detect_communities(R, 7).data());
    }
}
BENCHMARK(BM_DetectCommunities)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
