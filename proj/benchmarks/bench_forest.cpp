#include <benchmark/benchmark.h>

#include <vector>

#include "msihar/forest.hpp"
#include "msihar/rng.hpp"

namespace {

struct Blobs {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
};

Blobs make_blobs(int per_class, int n_features) {
    msihar::SplitMix64 rng(3);
    Blobs out;
    for (int c = 0; c < 5; ++c)
        for (int i = 0; i < per_class; ++i) {
            std::vector<double> row(static_cast<std::size_t>(n_features));
            for (int d = 0; d < n_features; ++d)
                row[static_cast<std::size_t>(d)] =
                    ((c + d) % 5) * 1.5 + rng.next_gaussian();
            out.X.push_back(std::move(row));
            out.y.push_back(c);
        }
    return out;
}

void bm_train_forest(benchmark::State& state) {
    auto blobs = make_blobs(static_cast<int>(state.range(0)), 48);
    msihar::ForestParams params;
    params.n_trees = static_cast<int>(state.range(1));
    params.seed = 5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(msihar::train_forest(blobs.X, blobs.y, params));
    }
}
BENCHMARK(bm_train_forest)->Args({60, 50})->Args({120, 100})->Unit(benchmark::kMillisecond);

void bm_forest_predict(benchmark::State& state) {
    auto blobs = make_blobs(100, 48);
    msihar::ForestParams params;
    params.n_trees = 100;
    params.seed = 5;
    auto forest = msihar::train_forest(blobs.X, blobs.y, params);
    for (auto _ : state) {
        benchmark::DoNotOptimize(forest.predict(blobs.X));
    }
}
BENCHMARK(bm_forest_predict)->Unit(benchmark::kMillisecond);

}  // namespace
