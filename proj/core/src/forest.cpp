#include "msihar/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msihar/detail/json.hpp"

#include "msihar/rng.hpp"
#include "msihar/thread_pool.hpp"

namespace msihar {
namespace {

double gini_from_counts(const std::vector<std::size_t>& counts, std::size_t total) {
    double sum_sq = 0.0;
    for (std::size_t c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const std::vector<std::vector<double>>& X,
                const std::vector<int>& dense_y, std::size_t n_classes,
                const ForestParams& params, int max_features,
                std::uint64_t tree_seed)
        : X_(X),
          y_(dense_y),
          n_classes_(n_classes),
          params_(params),
          max_features_(max_features),
          rng_(tree_seed) {}

    Tree build() {
        const std::size_t n = X_.size();
        std::vector<std::size_t> root(n);
        if (params_.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) root[i] = rng_.next_below(n);
        } else {
            std::iota(root.begin(), root.end(), 0);
        }
        tree_.nodes.emplace_back();
        grow(std::move(root), 0, 0);
        return std::move(tree_);
    }

private:
    void grow(std::vector<std::size_t> indices, int depth, int node) {
        std::vector<std::size_t> counts(n_classes_, 0);
        for (std::size_t i : indices) ++counts[y_[i]];
        const std::size_t total = indices.size();
        const bool pure =
            std::count_if(counts.begin(), counts.end(),
                          [](std::size_t c) { return c > 0; }) <= 1;
        const bool depth_capped = params_.max_depth >= 0 && depth >= params_.max_depth;
        SplitChoice split;
        if (!pure && !depth_capped &&
            total >= 2 * static_cast<std::size_t>(params_.min_samples_leaf)) {
            split = best_split(indices, counts, total);
        }
        if (!split.found) {
            make_leaf(node, std::move(counts));
            return;
        }
        std::vector<std::size_t> left, right;
        left.reserve(total);
        right.reserve(total);
        for (std::size_t i : indices) {
            (X_[i][split.feature] <= split.threshold ? left : right).push_back(i);
        }
        indices.clear();
        indices.shrink_to_fit();
        const int left_id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        tree_.nodes.emplace_back();
        auto& nd = tree_.nodes[node];
        nd.feature = split.feature;
        nd.threshold = split.threshold;
        nd.left = left_id;
        nd.right = left_id + 1;
        grow(std::move(left), depth + 1, left_id);
        grow(std::move(right), depth + 1, left_id + 1);
    }

    void make_leaf(int node, std::vector<std::size_t> counts) {
        auto& nd = tree_.nodes[node];
        nd.feature = -1;
        std::size_t best = 0;
        for (std::size_t c = 0; c < counts.size(); ++c) {
            // Strict > keeps the smaller class index on ties.
            if (counts[c] > counts[best]) best = c;
        }
        nd.majority = static_cast<int>(best);
        nd.counts = std::move(counts);
    }

    SplitChoice best_split(const std::vector<std::size_t>& indices,
                           const std::vector<std::size_t>& counts,
                           std::size_t total) {
        const std::size_t n_features = X_.front().size();
        std::vector<std::size_t> pool(n_features);
        std::iota(pool.begin(), pool.end(), 0);
        const std::size_t k =
            std::min<std::size_t>(max_features_, n_features);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + rng_.next_below(n_features - i);
            std::swap(pool[i], pool[j]);
        }
        std::vector<std::size_t> candidates(pool.begin(), pool.begin() + k);
        std::sort(candidates.begin(), candidates.end());

        const double parent_gini = gini_from_counts(counts, total);
        const double n = static_cast<double>(total);
        SplitChoice best;
        best.decrease = 1e-12;  // reject splits that only shuffle fp noise
        std::vector<std::pair<double, int>> values(total);
        std::vector<std::size_t> left_counts(n_classes_);
        const std::size_t min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);
        for (std::size_t f : candidates) {
            for (std::size_t i = 0; i < total; ++i) {
                values[i] = {X_[indices[i]][f], y_[indices[i]]};
            }
            std::sort(values.begin(), values.end());
            std::fill(left_counts.begin(), left_counts.end(), 0);
            std::size_t n_left = 0;
            for (std::size_t i = 0; i + 1 < total; ++i) {
                ++left_counts[values[i].second];
                ++n_left;
                if (values[i].first == values[i + 1].first) continue;
                const std::size_t n_right = total - n_left;
                if (n_left < min_leaf || n_right < min_leaf) continue;
                double left_sq = 0.0, right_sq = 0.0;
                for (std::size_t c = 0; c < n_classes_; ++c) {
                    const double lc = static_cast<double>(left_counts[c]);
                    const double rc = static_cast<double>(counts[c] - left_counts[c]);
                    left_sq += lc * lc;
                    right_sq += rc * rc;
                }
                const double nl = static_cast<double>(n_left);
                const double nr = static_cast<double>(n_right);
                const double child =
                    (nl - left_sq / nl + nr - right_sq / nr) / n;
                const double decrease = parent_gini - child;
                // Candidates are scanned in ascending feature then threshold
                // order, so strict > realizes the tie-break rule.
                if (decrease > best.decrease) {
                    best.found = true;
                    best.feature = static_cast<int>(f);
                    best.threshold =
                        values[i].first + 0.5 * (values[i + 1].first - values[i].first);
                    best.decrease = decrease;
                }
            }
        }
        return best;
    }

    const std::vector<std::vector<double>>& X_;
    const std::vector<int>& y_;
    std::size_t n_classes_;
    const ForestParams& params_;
    std::size_t max_features_;
    SplitMix64 rng_;
    Tree tree_;
};

}  // namespace

Forest::Forest(std::vector<Tree> trees, std::vector<int> class_ids,
               std::size_t n_features, ForestParams params)
    : trees_(std::move(trees)),
      class_ids_(std::move(class_ids)),
      n_features_(n_features),
      params_(params) {}

int Forest::predict_one(const std::vector<double>& x) const {
    if (x.size() != n_features_) {
        throw DimensionMismatch("expected " + std::to_string(n_features_) +
                                " features, got " + std::to_string(x.size()));
    }
    std::vector<std::size_t> votes(class_ids_.size(), 0);
    for (const auto& tree : trees_) {
        int node = 0;
        while (tree.nodes[node].feature >= 0) {
            const auto& nd = tree.nodes[node];
            node = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
        }
        ++votes[tree.nodes[node].majority];
    }
    std::size_t best = 0;
    for (std::size_t c = 0; c < votes.size(); ++c) {
        if (votes[c] > votes[best]) best = c;
    }
    return class_ids_[best];
}

std::vector<int> Forest::predict(const std::vector<std::vector<double>>& X) const {
    std::vector<int> out(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) out[i] = predict_one(X[i]);
    return out;
}

Forest train_forest(const std::vector<std::vector<double>>& X,
                    const std::vector<int>& y, const ForestParams& params) {
    if (X.size() != y.size()) {
        throw DimensionMismatch("feature matrix has " + std::to_string(X.size()) +
                                " rows but " + std::to_string(y.size()) + " labels");
    }
    if (X.size() < 2) {
        throw EmptyTraining("training needs at least 2 samples");
    }
    const std::size_t n_features = X.front().size();
    for (const auto& row : X) {
        if (row.size() != n_features) {
            throw DimensionMismatch("ragged feature matrix");
        }
    }
    if (params.n_trees < 1 || params.min_samples_leaf < 1) {
        throw ConfigInvalid("forest needs n_trees >= 1 and min_samples_leaf >= 1");
    }

    std::vector<int> class_ids = y;
    std::sort(class_ids.begin(), class_ids.end());
    class_ids.erase(std::unique(class_ids.begin(), class_ids.end()),
                    class_ids.end());
    std::vector<int> dense_y(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        dense_y[i] = static_cast<int>(
            std::lower_bound(class_ids.begin(), class_ids.end(), y[i]) -
            class_ids.begin());
    }

    int max_features = params.max_features;
    if (max_features <= 0) {
        max_features = std::max(
            1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_features)))));
    }
    max_features = std::min(max_features, static_cast<int>(n_features));

    const auto seeds = derive_seeds(params.seed, static_cast<std::size_t>(params.n_trees));
    std::vector<Tree> trees(params.n_trees);
    parallel_for(static_cast<std::size_t>(params.n_trees), [&](std::size_t t) {
        TreeBuilder builder(X, dense_y, class_ids.size(), params, max_features,
                            seeds[t]);
        trees[t] = builder.build();
    });
    return Forest(std::move(trees), std::move(class_ids), n_features, params);
}

nlohmann::ordered_json Forest::to_json() const {
    nlohmann::ordered_json doc;
    doc["format"] = "msihar-forest-v1";
    doc["classes"] = class_ids_;
    doc["n_features"] = n_features_;
    doc["params"] = {{"n_trees", params_.n_trees},
                     {"max_features", params_.max_features},
                     {"min_samples_leaf", params_.min_samples_leaf},
                     {"max_depth", params_.max_depth},
                     {"bootstrap", params_.bootstrap},
                     {"seed", params_.seed}};
    nlohmann::ordered_json trees = nlohmann::ordered_json::array();
    for (const auto& tree : trees_) {
        nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
        for (const auto& nd : tree.nodes) {
            if (nd.feature >= 0) {
                nodes.push_back({nd.feature, nd.threshold, nd.left, nd.right});
            } else {
                nlohmann::ordered_json leaf = {-1};
                leaf.push_back(nd.counts);
                nodes.push_back(std::move(leaf));
            }
        }
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    doc["trees"] = std::move(trees);
    return doc;
}

Forest Forest::from_json(const nlohmann::ordered_json& doc) {
    if (!doc.is_object() || doc.value("format", "") != "msihar-forest-v1") {
        throw MalformedHeader("not a msihar-forest-v1 document");
    }
    std::vector<int> class_ids = doc.at("classes").get<std::vector<int>>();
    const std::size_t n_features = doc.at("n_features").get<std::size_t>();
    const auto& pj = doc.at("params");
    ForestParams params;
    params.n_trees = pj.at("n_trees").get<int>();
    params.max_features = pj.at("max_features").get<int>();
    params.min_samples_leaf = pj.at("min_samples_leaf").get<int>();
    params.max_depth = pj.at("max_depth").get<int>();
    params.bootstrap = pj.at("bootstrap").get<bool>();
    params.seed = pj.at("seed").get<std::uint64_t>();
    std::vector<Tree> trees;
    for (const auto& tj : doc.at("trees")) {
        Tree tree;
        for (const auto& nj : tj.at("nodes")) {
            TreeNode nd;
            const int feature = nj.at(0).get<int>();
            if (feature >= 0) {
                nd.feature = feature;
                nd.threshold = nj.at(1).get<double>();
                nd.left = nj.at(2).get<int>();
                nd.right = nj.at(3).get<int>();
            } else {
                nd.counts = nj.at(1).get<std::vector<std::size_t>>();
                std::size_t best = 0;
                for (std::size_t c = 0; c < nd.counts.size(); ++c) {
                    if (nd.counts[c] > nd.counts[best]) best = c;
                }
                nd.majority = static_cast<int>(best);
            }
            tree.nodes.push_back(std::move(nd));
        }
        trees.push_back(std::move(tree));
    }
    return Forest(std::move(trees), std::move(class_ids), n_features, params);
}

}  // namespace msihar
