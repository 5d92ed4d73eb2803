#include <benchmark/benchmark.h>

#include <vector>

#include "msihar/msi.hpp"
#include "msihar/rng.hpp"
#include "msihar/types.hpp"

namespace {

msihar::FlowField make_field(int h, int w, msihar::SplitMix64& rng) {
    std::vector<float> u(static_cast<std::size_t>(h) * w), v(u.size());
    for (auto& x : u) x = static_cast<float>(rng.next_uniform(-0.4, 0.4));
    for (auto& x : v) x = static_cast<float>(rng.next_uniform(-0.4, 0.4));
    return msihar::FlowField(h, w, std::move(u), std::move(v), true);
}

void bm_msi_frame(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    msihar::SplitMix64 rng(7);
    auto field = make_field(side, side, rng);
    int patch = msihar::patch_size(side, side);
    double x = (side - 1) / 2.0, y = (side - 1) / 2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(msihar::msi_frame(field, x, y, patch));
    }
}
BENCHMARK(bm_msi_frame)->Arg(480)->Arg(1080);

void bm_msi_window_collapse(benchmark::State& state) {
    msihar::SplitMix64 rng(11);
    std::vector<double> per_frame(static_cast<std::size_t>(state.range(0)));
    for (auto& v : per_frame) v = rng.next_uniform(0.0, 0.2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(msihar::msi_window(per_frame));
    }
}
BENCHMARK(bm_msi_window_collapse)->Arg(30)->Arg(300);

void bm_class_msi_mode(benchmark::State& state) {
    msihar::SplitMix64 rng(13);
    std::vector<double> values(static_cast<std::size_t>(state.range(0)));
    for (auto& v : values) v = 0.5 + 0.15 * rng.next_gaussian();
    for (auto& v : values) v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    for (auto _ : state) {
        benchmark::DoNotOptimize(msihar::class_msi_mode(values));
    }
}
BENCHMARK(bm_class_msi_mode)->Arg(100)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
