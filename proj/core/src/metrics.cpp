#include "msihar/metrics.hpp"

#include <map>

#include "msihar/rng.hpp"

namespace msihar {
namespace {

void check_lengths(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size()) {
        throw LengthMismatch("pred has " + std::to_string(pred.size()) +
                             " entries, truth has " + std::to_string(truth.size()));
    }
    if (pred.empty()) {
        throw EmptyInput("f1 needs at least one prediction");
    }
}

}  // namespace

double binary_f1(const std::vector<int>& pred, const std::vector<int>& truth,
                 int positive_class) {
    check_lengths(pred, truth);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] == positive_class;
        const bool t = truth[i] == positive_class;
        if (p && t) ++tp;
        else if (p && !t) ++fp;
        else if (!p && t) ++fn;
    }
    if (tp + fp == 0 || tp + fn == 0) return 0.0;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
    check_lengths(pred, truth);
    std::map<int, bool> present;
    for (int t : truth) present[t] = true;
    double sum = 0.0;
    for (const auto& [cls, _] : present) {
        sum += binary_f1(pred, truth, cls);
    }
    return sum / static_cast<double>(present.size());
}

std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& y,
                                                       int k,
                                                       std::uint64_t seed) {
    if (k < 2) {
        throw ConfigInvalid("stratified_kfold needs k >= 2");
    }
    if (y.empty()) {
        throw EmptyInput("stratified_kfold needs at least one label");
    }
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
    for (const auto& [cls, members] : by_class) {
        if (members.size() < static_cast<std::size_t>(k)) {
            throw ClassTooSmall("class " + std::to_string(cls) + " has " +
                                std::to_string(members.size()) +
                                " samples, fewer than k=" + std::to_string(k));
        }
    }
    SplitMix64 rng(seed);
    std::vector<std::vector<std::size_t>> folds(k);
    for (auto& [cls, members] : by_class) {
        rng.shuffle(members);
        for (std::size_t j = 0; j < members.size(); ++j) {
            folds[j % k].push_back(members[j]);
        }
    }
    return folds;
}

}  // namespace msihar
