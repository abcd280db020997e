#include <benchmark/benchmark.h>

#include <cmath>

#include "psa/maps.hpp"
#include "psa/rng.hpp"

namespace {

using namespace psa;

/// Off-center disk with a speckled rim: nontrivial for the distance
/// transform without being pathological.
BinaryMask test_mask(int n) {
    SeededRng rng(17);
    Grid g(n, n);
    const double cr = 0.55 * n, cc = 0.45 * n, rad = 0.3 * n;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const double d = std::hypot(r - cr, c - cc);
            const bool inside = d < rad + (rng.uniform() - 0.5) * 3.0;
            g.at(r, c) = inside ? 1.0f : 0.0f;
        }
    return BinaryMask(std::move(g));
}

void bm_distance_to_foreground(benchmark::State& state) {
    const BinaryMask m = test_mask(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(maps::distance_to_foreground(m));
}
BENCHMARK(bm_distance_to_foreground)->Arg(64)->Arg(128)->Arg(256);

void bm_signed_distance(benchmark::State& state) {
    const BinaryMask m = test_mask(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(maps::signed_distance_transform(m));
}
BENCHMARK(bm_signed_distance)->Arg(64)->Arg(128)->Arg(256);

void bm_edge_map(benchmark::State& state) {
    const BinaryMask m = test_mask(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(maps::edge_map(m));
}
BENCHMARK(bm_edge_map)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
