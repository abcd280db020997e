#include <benchmark/benchmark.h>

#include <cmath>

#include "psa/metrics.hpp"
#include "psa/rng.hpp"

namespace {

using namespace psa;

/// Disk mask, optionally dilated, so pred/ref pairs disagree along a band of
/// surface pixels — the regime the distance metrics are tuned for.
BinaryMask disk(int n, double grow, std::uint64_t seed) {
    SeededRng rng(seed);
    Grid g(n, n);
    const double cr = 0.5 * n, cc = 0.5 * n, rad = 0.32 * n + grow;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const double d = std::hypot(r - cr, c - cc);
            g.at(r, c) = d < rad + (rng.uniform() - 0.5) * 2.0 ? 1.0f : 0.0f;
        }
    return BinaryMask(std::move(g));
}

void bm_dsc(benchmark::State& state) {
    const int n = int(state.range(0));
    const BinaryMask pred = disk(n, 1.5, 3), ref = disk(n, 0.0, 4);
    for (auto _ : state) benchmark::DoNotOptimize(metrics::dsc(pred, ref));
}
BENCHMARK(bm_dsc)->Arg(64)->Arg(128);

void bm_hd95(benchmark::State& state) {
    const int n = int(state.range(0));
    const BinaryMask pred = disk(n, 1.5, 3), ref = disk(n, 0.0, 4);
    for (auto _ : state) benchmark::DoNotOptimize(metrics::hd95(pred, ref));
}
BENCHMARK(bm_hd95)->Arg(64)->Arg(128);

void bm_assd(benchmark::State& state) {
    const int n = int(state.range(0));
    const BinaryMask pred = disk(n, 1.5, 3), ref = disk(n, 0.0, 4);
    for (auto _ : state) benchmark::DoNotOptimize(metrics::assd(pred, ref));
}
BENCHMARK(bm_assd)->Arg(64)->Arg(128);

void bm_evaluate_pair(benchmark::State& state) {
    const int n = int(state.range(0));
    const BinaryMask pred = disk(n, 1.5, 3), ref = disk(n, 0.0, 4);
    for (auto _ : state) benchmark::DoNotOptimize(metrics::evaluate_pair(pred, ref));
}
BENCHMARK(bm_evaluate_pair)->Arg(64)->Arg(128);

}  // namespace
