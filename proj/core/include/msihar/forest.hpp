#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msihar/detail/json.hpp"

#include "msihar/errors.hpp"

namespace msihar {

struct ForestParams {
    int n_trees = 100;
    int max_features = 0;  // 0 selects floor(sqrt(feature count)), min 1
    int min_samples_leaf = 1;
    int max_depth = -1;  // -1 = unlimited
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

// feature >= 0: internal node, x[feature] <= threshold goes left.
// feature == -1: leaf; counts holds per-class sample counts (class list order)
// and majority the pre-resolved vote.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<std::size_t> counts;
    int majority = -1;
};

struct Tree {
    std::vector<TreeNode> nodes;
};

class Forest {
public:
    Forest() = default;
    Forest(std::vector<Tree> trees, std::vector<int> class_ids,
           std::size_t n_features, ForestParams params);

    const std::vector<Tree>& trees() const { return trees_; }
    const std::vector<int>& class_ids() const { return class_ids_; }
    std::size_t n_features() const { return n_features_; }
    const ForestParams& params() const { return params_; }

    int predict_one(const std::vector<double>& x) const;
    std::vector<int> predict(const std::vector<std::vector<double>>& X) const;

    nlohmann::ordered_json to_json() const;
    static Forest from_json(const nlohmann::ordered_json& doc);

private:
    std::vector<Tree> trees_;
    std::vector<int> class_ids_;  // sorted ascending
    std::size_t n_features_ = 0;
    ForestParams params_;
};

Forest train_forest(const std::vector<std::vector<double>>& X,
                    const std::vector<int>& y, const ForestParams& params);

}  // namespace msihar
