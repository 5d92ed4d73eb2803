#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "msihar/flow.hpp"
#include "msihar/types.hpp"

namespace {

msihar::GrayFrame moving_blob(int h, int w, double cx, double cy) {
    std::vector<double> px(static_cast<std::size_t>(h) * w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double d2 = (r - cy) * (r - cy) + (c - cx) * (c - cx);
            px[static_cast<std::size_t>(r) * w + c] = std::exp(-d2 / 50.0);
        }
    return msihar::GrayFrame(h, w, std::move(px));
}

void bm_horn_schunck(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    auto a = moving_blob(side, side, side / 2.0, side / 2.0);
    auto b = moving_blob(side, side, side / 2.0 + 1.5, side / 2.0 - 0.5);
    msihar::HornSchunckParams params;
    params.iterations = static_cast<int>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(msihar::horn_schunck(a, b, params));
    }
}
BENCHMARK(bm_horn_schunck)->Args({48, 100})->Args({128, 50});

}  // namespace
