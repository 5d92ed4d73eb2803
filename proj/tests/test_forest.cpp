#include <cmath>
#include <set>
#include <vector>

#include <doctest.h>

#include "msihar/errors.hpp"
#include "msihar/forest.hpp"
#include "msihar/metrics.hpp"
#include "msihar/rng.hpp"

using namespace msihar;

namespace {

// Three well-separated Gaussian clusters in 4 dimensions.
void make_clusters(std::vector<std::vector<double>>& X, std::vector<int>& y,
                   int per_class, SplitMix64& rng) {
    const double centers[3][4] = {{0, 0, 0, 0}, {6, 6, 0, 0}, {0, 6, 6, 6}};
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < per_class; ++i) {
            std::vector<double> x(4);
            for (int d = 0; d < 4; ++d) x[d] = centers[c][d] + 0.5 * rng.next_gaussian();
            X.push_back(std::move(x));
            y.push_back(c);
        }
}

}  // namespace

TEST_CASE("training twice with the same seed is bit-identical") {
    SplitMix64 rng(1001);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    make_clusters(X, y, 30, rng);
    ForestParams params;
    params.n_trees = 25;
    params.seed = 7;
    auto a = train_forest(X, y, params);
    auto b = train_forest(X, y, params);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.to_json().dump() == b.to_json().dump());
    params.seed = 8;
    auto c = train_forest(X, y, params);
    CHECK(a.to_json() != c.to_json());
}

TEST_CASE("separable clusters train to near-perfect accuracy") {
    SplitMix64 rng(2002);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    make_clusters(X, y, 60, rng);
    ForestParams params;
    params.n_trees = 50;
    params.seed = 3;
    auto forest = train_forest(X, y, params);
    auto pred = forest.predict(X);
    int correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (pred[i] == y[i]) ++correct;
    CHECK(static_cast<double>(correct) / static_cast<double>(y.size()) >= 0.99);
    CHECK(macro_f1(pred, y) >= 0.99);
}

TEST_CASE("held-out points from the same clusters classify correctly") {
    SplitMix64 rng(3003);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    make_clusters(X, y, 50, rng);
    ForestParams params;
    params.n_trees = 40;
    params.seed = 5;
    auto forest = train_forest(X, y, params);
    std::vector<std::vector<double>> Xt;
    std::vector<int> yt;
    make_clusters(Xt, yt, 20, rng);
    auto pred = forest.predict(Xt);
    int correct = 0;
    for (std::size_t i = 0; i < yt.size(); ++i)
        if (pred[i] == yt[i]) ++correct;
    CHECK(static_cast<double>(correct) / static_cast<double>(yt.size()) >= 0.95);
}

TEST_CASE("a single unbootstrapped tree memorizes distinct points") {
    std::vector<std::vector<double>> X{{0.0}, {1.0}, {2.0}, {3.0}};
    std::vector<int> y{0, 1, 0, 1};
    ForestParams params;
    params.n_trees = 1;
    params.bootstrap = false;
    params.max_features = 1;
    auto forest = train_forest(X, y, params);
    auto pred = forest.predict(X);
    CHECK(pred == y);
}

TEST_CASE("min_samples_leaf caps leaf granularity") {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (int i = 0; i < 16; ++i) {
        X.push_back({static_cast<double>(i)});
        y.push_back(i % 2);
    }
    ForestParams params;
    params.n_trees = 1;
    params.bootstrap = false;
    params.min_samples_leaf = 4;
    auto forest = train_forest(X, y, params);
    for (const auto& node : forest.trees()[0].nodes) {
        if (node.feature == -1) {
            std::size_t total = 0;
            for (auto c : node.counts) total += c;
            CHECK(total >= 4);
        }
    }
}

TEST_CASE("max_depth one gives a stump") {
    SplitMix64 rng(4);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (int i = 0; i < 40; ++i) {
        X.push_back({rng.next_gaussian() + (i % 2 ? 4.0 : 0.0)});
        y.push_back(i % 2);
    }
    ForestParams params;
    params.n_trees = 1;
    params.bootstrap = false;
    params.max_depth = 1;
    auto forest = train_forest(X, y, params);
    CHECK(forest.trees()[0].nodes.size() <= 3);
}

TEST_CASE("class ids survive sparse label sets and vote ties break low") {
    std::vector<std::vector<double>> X{{0.0}, {0.0}, {10.0}, {10.0}};
    std::vector<int> y{3, 3, 11, 11};
    ForestParams params;
    params.n_trees = 2;
    params.bootstrap = false;
    params.max_features = 1;
    auto forest = train_forest(X, y, params);
    CHECK(forest.class_ids() == std::vector<int>{3, 11});
    CHECK(forest.predict_one({0.0}) == 3);
    CHECK(forest.predict_one({10.0}) == 11);
}

TEST_CASE("json round trip preserves predictions exactly") {
    SplitMix64 rng(5005);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    make_clusters(X, y, 25, rng);
    ForestParams params;
    params.n_trees = 15;
    params.seed = 9;
    auto forest = train_forest(X, y, params);
    auto doc = forest.to_json();
    CHECK(doc["format"] == "msihar-forest-v1");
    auto back = Forest::from_json(doc);
    CHECK(back.n_features() == forest.n_features());
    CHECK(back.class_ids() == forest.class_ids());
    for (const auto& x : X) CHECK(back.predict_one(x) == forest.predict_one(x));
    CHECK(back.to_json().dump() == doc.dump());
}

TEST_CASE("training input validation") {
    ForestParams params;
    CHECK_THROWS_AS(train_forest({}, {}, params), EmptyTraining);
    CHECK_THROWS_AS(train_forest({{1.0}}, {0, 1}, params), DimensionMismatch);
    CHECK_THROWS_AS(train_forest({{1.0}, {1.0, 2.0}}, {0, 1}, params), DimensionMismatch);
    ForestParams bad;
    bad.n_trees = 0;
    CHECK_THROWS_AS(train_forest({{1.0}, {2.0}}, {0, 1}, bad), ConfigInvalid);
    auto forest = train_forest({{1.0}, {2.0}}, {0, 1}, params);
    CHECK_THROWS_AS(forest.predict_one({1.0, 2.0}), DimensionMismatch);
}

TEST_CASE("constant features yield a single-leaf majority tree") {
    std::vector<std::vector<double>> X{{2.0}, {2.0}, {2.0}};
    std::vector<int> y{1, 0, 1};
    ForestParams params;
    params.n_trees = 3;
    params.bootstrap = false;
    auto forest = train_forest(X, y, params);
    CHECK(forest.predict_one({2.0}) == 1);
    CHECK(forest.trees()[0].nodes.size() == 1);
}
